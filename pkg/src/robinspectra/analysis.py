"""Physical interpretation of raw spectral output.

Covers sign structure of the ground state, log-linear decay-rate fits along
rays, two-sided truncation control via the outer Dirichlet/Neumann pair, and
Richardson extrapolation over grid refinements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .discretize import DiscreteForm, Grid, OuterBC, assemble
from .eigensolve import lowest_eigenpairs
from .errors import NoAsymptoticRegimeError, UnderflowWindowError
from .potential import BoundaryPotential

DEFAULT_N_RADII = 40
UNDERFLOW_FLOOR = 1e-14


def ground_state_positivity(v: np.ndarray, tol: float) -> bool:
    """True iff v has a single sign up to tol after sign normalization."""
    v = np.asarray(v, dtype=np.float64)
    j = int(np.argmax(np.abs(v)))
    if v[j] < 0:
        v = -v
    return bool(np.min(v) >= -tol)


@dataclass(frozen=True)
class DecayFit:
    ray: tuple[float, float]
    r_window: tuple[float, float]
    slope: float
    intercept: float
    r_squared: float
    predicted_rate: float
    with_prefactor: bool
    slope_stderr: float


def _default_radii(
    ray: np.ndarray, h: float, r_min: float, r_max: float, n_radii: int
) -> np.ndarray:
    """Node-aligned radii for axis/diagonal rays, else uniform.

    Node alignment keeps interpolation exact on the sampled points, which
    matters when fitting analytic reference states to tight tolerances.
    """
    dx, dy = ray
    if min(abs(dx), abs(dy)) < 1e-12:
        step = h
    elif abs(abs(dx) - abs(dy)) < 1e-12:
        step = h * math.sqrt(2.0)
    else:
        return np.linspace(r_min, r_max, n_radii)
    k_lo = int(math.ceil(r_min / step - 1e-9))
    k_hi = int(math.floor(r_max / step + 1e-9))
    return step * np.arange(k_lo, k_hi + 1)


def decay_fit(
    F: DiscreteForm,
    v: np.ndarray,
    E: float,
    ray: Sequence[float],
    r_min: float,
    r_max: float,
    with_prefactor: bool = True,
    n_radii: int = DEFAULT_N_RADII,
    radii: Optional[np.ndarray] = None,
) -> DecayFit:
    """Least-squares decay rate of nodal values v along a ray from the origin.

    Fits log|v| (plus half log r when the 1/sqrt(r) prefactor is modelled)
    against r; off-node points are obtained by bilinear interpolation.
    """
    if E >= 0:
        raise ValueError("decay fit requires a negative energy")
    ray = np.asarray(ray, dtype=np.float64)
    nrm = np.linalg.norm(ray)
    if nrm == 0 or ray[0] < 0 or ray[1] < 0:
        raise ValueError("ray must be a nonzero direction in the closed quadrant")
    ray = ray / nrm

    support = F.potential.support_bound()
    if math.isfinite(support) and r_min < support + 1:
        raise ValueError(f"r_min must be at least support_bound + 1 = {support + 1}")
    if r_max > F.grid.R - 2:
        raise ValueError(f"r_max must be at most R - 2 = {F.grid.R - 2}")
    if r_max <= r_min:
        raise ValueError("empty fit window")

    if radii is None:
        radii = _default_radii(ray, F.grid.h, r_min, r_max, n_radii)
    radii = np.asarray(radii, dtype=np.float64)
    if len(radii) < 10:
        raise ValueError("need at least 10 sample radii in the window")

    coords = F.grid.coords(F.outer_bc)
    grid2d = np.asarray(v, dtype=np.float64).reshape(F.n, F.n)
    interp = RegularGridInterpolator((coords, coords), grid2d, method="linear")
    pts = np.outer(radii, ray)
    samples = interp(pts)

    absvals = np.abs(samples)
    if np.any(absvals < UNDERFLOW_FLOOR):
        raise UnderflowWindowError(
            "eigenfunction underflows inside the fit window; shrink r_max"
        )
    ylog = np.log(absvals)
    if with_prefactor:
        ylog = ylog + 0.5 * np.log(radii)

    slope, intercept, stderr, r2 = _linfit(radii, ylog)
    return DecayFit(
        ray=(float(ray[0]), float(ray[1])),
        r_window=(float(r_min), float(r_max)),
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        predicted_rate=-math.sqrt(abs(E)),
        with_prefactor=with_prefactor,
        slope_stderr=stderr,
    )


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    sxy = float(np.sum((x - xm) * (y - ym)))
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    stderr = math.sqrt(ss_res / ((n - 2) * sxx)) if n > 2 else 0.0
    return slope, intercept, stderr, max(0.0, r2)


def truncation_bracket(
    p: BoundaryPotential, R: float, h: float, k: int, tol: float = 1e-8
) -> tuple[np.ndarray, np.ndarray]:
    """Outer-Neumann (lower) and outer-Dirichlet (upper) eigenvalues.

    The Dirichlet-truncated trial space embeds by zero extension, so for each
    index the pair encloses the discrete eigenvalue of the truncated problem.
    """
    grid = Grid(R, h)
    lo = lowest_eigenpairs(assemble(p, grid, OuterBC.NEUMANN), k, tol).eigenvalues
    hi = lowest_eigenpairs(assemble(p, grid, OuterBC.DIRICHLET), k, tol).eigenvalues
    return lo, hi


@dataclass(frozen=True)
class ConvergenceStudy:
    h_values: tuple[float, ...]
    lambda_values: tuple[float, ...]
    extrapolated: float
    order: float


def richardson(study_points: Sequence[tuple[float, float]]) -> ConvergenceStudy:
    """Observed-order Richardson extrapolation over ratio-2 grid refinements."""
    pts = sorted(study_points, key=lambda t: -t[0])
    if len(pts) < 3:
        raise ValueError("need at least 3 study points")
    for (h1, _), (h2, _) in zip(pts, pts[1:]):
        if abs(h1 / h2 - 2.0) > 1e-9:
            raise ValueError("spacings must be in constant ratio 2")
    hs = tuple(h for h, _ in pts)
    lams = tuple(l for _, l in pts)
    d1 = lams[-3] - lams[-2]
    d2 = lams[-2] - lams[-1]
    if d1 == 0 or d2 == 0 or d1 * d2 < 0 or abs(d2) >= abs(d1):
        raise NoAsymptoticRegimeError(
            f"differences {d1:.3e}, {d2:.3e} are not monotonically shrinking"
        )
    order = math.log2(d1 / d2)
    extrapolated = lams[-1] - d2 / (2 ** order - 1)
    return ConvergenceStudy(
        h_values=hs, lambda_values=lams, extrapolated=extrapolated, order=order
    )


def l2_distance(F: DiscreteForm, u: np.ndarray, v: np.ndarray) -> float:
    """Weighted-L2 distance between nodal vectors after sign alignment."""
    u = np.asarray(u) / F.weighted_norm(u)
    v = np.asarray(v) / F.weighted_norm(v)
    if float(np.dot(F.scale * u, F.scale * v)) < 0:
        v = -v
    return F.weighted_norm(u - v)
