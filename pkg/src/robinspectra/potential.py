"""Boundary interaction strength sigma(y) on the half-line.

All kinds are immutable. The piecewise-constant kinds expose an exact cell
decomposition, so every integral functional below is either a closed form
per cell or an adaptive quadrature over finitely many cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import NotIntegrableError

STRETCHED_QUAD_ABSTOL = 1e-10


class BoundaryPotential:
    """Common interface for the boundary interaction strength."""

    def eval(self, y: float) -> float:
        raise NotImplementedError

    def ess_sup(self) -> float:
        raise NotImplementedError

    def support_bound(self) -> float:
        """Smallest grid-representable L with sigma = 0 beyond L (may be inf)."""
        raise NotImplementedError

    def integral(self) -> float:
        raise NotImplementedError

    def weighted_integral(self, a: float) -> float:
        """Integral of sigma(y) * exp(-a*y) over the half-line, a > 0."""
        raise NotImplementedError

    def stretched_weighted_integral(self, eps: float) -> float:
        """Integral of sigma(y) * exp(-y**eps) over the half-line, 0 < eps <= 1."""
        raise NotImplementedError


def _check_y(y: float) -> None:
    if y < 0:
        raise ValueError(f"boundary coordinate must be nonnegative, got {y}")


@dataclass(frozen=True)
class Constant(BoundaryPotential):
    sigma: float

    def eval(self, y):
        _check_y(y)
        return self.sigma

    def ess_sup(self):
        return abs(self.sigma)

    def support_bound(self):
        return 0.0 if self.sigma == 0 else math.inf

    def integral(self):
        if self.sigma == 0:
            return 0.0
        raise NotIntegrableError("constant nonzero potential has infinite support")

    def weighted_integral(self, a):
        if a <= 0:
            raise ValueError("weight parameter must be positive")
        return self.sigma / a

    def stretched_weighted_integral(self, eps):
        if not 0 < eps <= 1:
            raise ValueError("stretch exponent must lie in (0, 1]")
        if self.sigma == 0:
            return 0.0
        raise NotIntegrableError("constant nonzero potential has infinite support")


class _CompactlySupported(BoundaryPotential):
    """Piecewise-constant potential with finitely many cells and zero tail."""

    def cells(self) -> list[tuple[float, float, float]]:
        """Left-closed/right-open cells (lo, hi, value) covering the support."""
        raise NotImplementedError

    def eval(self, y):
        _check_y(y)
        for lo, hi, v in self.cells():
            if lo <= y < hi:
                return v
        return 0.0

    def ess_sup(self):
        vals = [abs(v) for _, _, v in self.cells()]
        return max(vals, default=0.0)

    def support_bound(self):
        for lo, hi, v in reversed(self.cells()):
            if v != 0:
                return hi
        return 0.0

    def integral(self):
        return sum(v * (hi - lo) for lo, hi, v in self.cells())

    def weighted_integral(self, a):
        if a <= 0:
            raise ValueError("weight parameter must be positive")
        return sum(
            v * (math.exp(-a * lo) - math.exp(-a * hi)) / a
            for lo, hi, v in self.cells()
        )

    def stretched_weighted_integral(self, eps):
        if not 0 < eps <= 1:
            raise ValueError("stretch exponent must lie in (0, 1]")
        total = 0.0
        for lo, hi, v in self.cells():
            if v == 0:
                continue
            val, _ = quad(
                lambda y: math.exp(-(y ** eps)),
                lo,
                hi,
                epsabs=STRETCHED_QUAD_ABSTOL,
                epsrel=0.0,
                limit=200,
            )
            total += v * val
        return total


@dataclass(frozen=True)
class Step(_CompactlySupported):
    sigma: float
    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("step range L must be positive")

    def cells(self):
        return [(0.0, self.L, self.sigma)]


@dataclass(frozen=True)
class PiecewiseConstant(_CompactlySupported):
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(self.breakpoints))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.breakpoints) != len(self.values):
            raise ValueError("breakpoints and values must have equal length")
        if not self.breakpoints:
            raise ValueError("need at least one cell")
        prev = 0.0
        for b in self.breakpoints:
            if b <= prev:
                raise ValueError("breakpoints must be strictly ascending and positive")
            prev = b

    def cells(self):
        out = []
        lo = 0.0
        for hi, v in zip(self.breakpoints, self.values):
            out.append((lo, hi, float(v)))
            lo = hi
        return out


@dataclass(frozen=True)
class Tabulated(_CompactlySupported):
    """Samples on a uniform grid y_k = k * h_s, zero beyond the last sample.

    Pointwise evaluation uses the nearest sample; the integral functionals
    use the cell [k*h_s, (k+1)*h_s) per sample so that the plain integral is
    exactly h_s times the sample sum.
    """

    samples: tuple[float, ...]
    h_s: float

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(float(s) for s in self.samples))
        if self.h_s <= 0:
            raise ValueError("sample spacing must be positive")
        if not self.samples:
            raise ValueError("need at least one sample")

    def cells(self):
        return [
            (k * self.h_s, (k + 1) * self.h_s, s)
            for k, s in enumerate(self.samples)
        ]

    def eval(self, y):
        _check_y(y)
        k = int(round(y / self.h_s))
        if k >= len(self.samples):
            return 0.0
        return self.samples[k]


def potential_from_dict(spec: dict) -> BoundaryPotential:
    """Build a potential from its tagged config record."""
    from .errors import ConfigError

    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("potential spec must be a mapping with a 'kind' tag")
    kind = spec["kind"]
    try:
        if kind == "constant":
            _require_keys(spec, {"kind", "sigma"})
            return Constant(float(spec["sigma"]))
        if kind == "step":
            _require_keys(spec, {"kind", "sigma", "L"})
            return Step(float(spec["sigma"]), float(spec["L"]))
        if kind == "piecewise":
            _require_keys(spec, {"kind", "breaks", "values"})
            return PiecewiseConstant(tuple(spec["breaks"]), tuple(spec["values"]))
        if kind == "tabulated":
            _require_keys(spec, {"kind", "samples", "h_s"})
            return Tabulated(tuple(spec["samples"]), float(spec["h_s"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad potential spec: {exc}") from exc
    raise ConfigError(f"unknown potential kind {kind!r}")


def _require_keys(spec: dict, allowed: set) -> None:
    from .errors import ConfigError

    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"unknown potential keys: {sorted(unknown)}")
    missing = allowed - set(spec)
    if missing:
        raise ConfigError(f"missing potential keys: {sorted(missing)}")
