"""Analytic bounds and certificates for a given boundary potential.

Everything here is cheap: closed forms, 1D root finding and 1D quadrature.
The expensive grid computations live in discretize/eigensolve and are only
compared against these bounds by the analysis layer and the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .analytic1d import interval_ground_kappa, interval_positive_roots
from .errors import (
    EssentialBottomNotZeroError,
    InapplicableError,
    NotAttractiveOnAverageError,
    NotIntegrableError,
)
from .potential import BoundaryPotential, Constant


class EssClass(Enum):
    NON_POSITIVE_TAIL = "NonPositiveTail"
    VANISHING_TAIL = "VanishingTail"
    CONSTANT_POSITIVE = "ConstantPositive"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class BoundsReport:
    crude_lower: float
    sandwich_lo: float
    sandwich_hi: float
    ess_class: EssClass
    ess_bottom: Optional[float]
    certificate: Optional[tuple[int, float]]
    count_bound: Optional[int]
    count_bound_applicable: bool


def crude_lower_bound(sigma_hat: float) -> float:
    """Certified lower bound -32*sigma_hat^2 on the whole spectrum."""
    if sigma_hat < 0:
        raise ValueError("sigma_hat must be nonnegative")
    return -32.0 * sigma_hat ** 2


def ground_energy_sandwich(p: BoundaryPotential) -> tuple[float, float]:
    """Two-sided enclosure of the ground energy.

    Lower bound -2*sigma_hat^2 from comparison with the constant-strength
    operator; upper bound from the Rayleigh quotient of that operator's
    ground state, evaluated in the rearranged form
    2*sigma_hat^2 - 8*sigma_hat^2 * integral(sigma(y) e^{-2 sigma_hat y}).
    """
    sigma_hat = p.ess_sup()
    if sigma_hat == 0:
        return (0.0, 0.0)
    lo = -2.0 * sigma_hat ** 2
    hi = 2.0 * sigma_hat ** 2 - 8.0 * sigma_hat ** 2 * p.weighted_integral(2 * sigma_hat)
    assert lo <= hi + 1e-12 * max(1.0, abs(lo))
    return (lo, max(lo, hi))


def ess_spectrum_class(p: BoundaryPotential) -> tuple[EssClass, Optional[float]]:
    """Classify the essential spectrum and report its bottom where known."""
    if isinstance(p, Constant):
        if p.sigma > 0:
            return (EssClass.CONSTANT_POSITIVE, -p.sigma ** 2)
        return (EssClass.NON_POSITIVE_TAIL, 0.0)
    if math.isfinite(p.support_bound()):
        return (EssClass.NON_POSITIVE_TAIL, 0.0)
    return (EssClass.INCONCLUSIVE, None)


def kinetic_term(eps: float) -> float:
    """Radial kinetic energy of the test profile exp(-r**eps): exactly pi*eps/8."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.pi * eps / 8.0


def bound_state_certificate(
    p: BoundaryPotential, n_max: int
) -> Optional[tuple[int, float]]:
    """Search for the first n <= n_max whose test function has negative energy.

    The trial energy at stretch exponent 1/n is
    pi/(8n) - 2 * integral(sigma(y) exp(-y**(1/n))); a negative value
    certifies a bound state whenever the essential spectrum starts at zero.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    _, bottom = ess_spectrum_class(p)
    if bottom != 0:
        raise EssentialBottomNotZeroError(
            "certificate requires the essential spectrum to start at zero"
        )
    if p.integral() <= 0:
        raise NotAttractiveOnAverageError(
            "potential integral must be positive for the certificate"
        )
    for n in range(1, n_max + 1):
        q = kinetic_term(1.0 / n) - 2.0 * p.stretched_weighted_integral(1.0 / n)
        if q < 0:
            return (n, q)
    return None


def negative_count_bound(p: BoundaryPotential) -> Optional[int]:
    """Upper bound on the number of negative eigenvalues via the 1D interval
    operator, valid for compact support [0, L] with sigma_hat <= 2/L.

    Returns None when sigma_hat > 2/L (bound inapplicable) or for the zero
    potential (no negative spectrum to bound).
    """
    L = p.support_bound()
    if not math.isfinite(L):
        raise InapplicableError("counting bound requires compact support")
    sigma_hat = p.ess_sup()
    if sigma_hat == 0:
        return None
    if sigma_hat > 2.0 / L:
        return None
    kappa = interval_ground_kappa(sigma_hat, L)
    roots = interval_positive_roots(sigma_hat, L, k_max=kappa)
    below = [k for k in roots if k < kappa * (1 - 1e-12)]
    return 1 + len(below)


def full_report(p: BoundaryPotential, n_max: int = 40) -> BoundsReport:
    sigma_hat = p.ess_sup()
    crude = crude_lower_bound(sigma_hat)
    lo, hi = ground_energy_sandwich(p)
    klass, bottom = ess_spectrum_class(p)

    try:
        certificate = bound_state_certificate(p, n_max)
    except (
        NotAttractiveOnAverageError,
        EssentialBottomNotZeroError,
        NotIntegrableError,
    ):
        certificate = None

    try:
        count = negative_count_bound(p)
    except InapplicableError:
        count = None

    return BoundsReport(
        crude_lower=crude,
        sandwich_lo=lo,
        sandwich_hi=hi,
        ess_class=klass,
        ess_bottom=bottom,
        certificate=certificate,
        count_bound=count,
        count_bound_applicable=count is not None,
    )
