"""Scalar helpers shared by every other module.

Three ingredients recur throughout the key-rate machinery: the binary
entropy, the cumulative click probability ``theta_n = 1 - (1-eta)^n`` of
the lossy detector on an n-photon packet, and the smallest mean
double-click probability that an n-photon input can exhibit when both
detectors are perfect.  The latter is the root of a one-dimensional
monotone equation and is found by bisection.
"""

from __future__ import annotations

import math
from functools import lru_cache

#: absolute slack allowed on probability-domain checks
DOMAIN_TOL = 1e-12


def validate_probability(value: float, name: str = "value") -> float:
    """Check ``value`` lies in [0, 1] up to DOMAIN_TOL and clamp it there."""
    if not (-DOMAIN_TOL <= value <= 1.0 + DOMAIN_TOL):
        raise ValueError(f"{name} = {value!r} violates 0 <= {name} <= 1")
    return min(max(value, 0.0), 1.0)


def validate_eta(value: float) -> float:
    """Check an efficiency ratio lies in (0, 1]."""
    if not (0.0 < value <= 1.0 + DOMAIN_TOL):
        raise ValueError(f"eta = {value!r} violates 0 < eta <= 1")
    return min(value, 1.0)


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy in bits, with h(0) = h(1) = 0.

    The endpoint convention 0*log(0) = 0 is applied explicitly so the
    function is continuous on the closed interval.
    """
    x = validate_probability(x, "x")
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def theta(eta: float, n: int) -> float:
    """Probability that the efficiency-``eta`` detector fires on n photons.

    Equals ``1 - (1-eta)^n``; nondecreasing in ``n`` and equal to ``eta``
    at ``n = 1``.
    """
    eta = validate_eta(eta)
    if n < 1:
        raise ValueError(f"n = {n} must be >= 1")
    return 1.0 - (1.0 - eta) ** n


def doubleclick_slack(n: int, y: float) -> float:
    """Entropic double-click residual for the n-photon sector.

    Returns ``2*y*log2(2^(n-1) - 1) + 2*h(y) - (n - 2)``.  For every
    state of the n-photon sector (n >= 3) the mean double-click
    probability under perfect detection makes this quantity nonnegative;
    the residual is strictly increasing in ``y`` on (0, 1/2), which is
    what makes the root finder below well posed.
    """
    if n < 3:
        raise ValueError(f"n = {n} must be >= 3")
    return 2.0 * y * math.log2(2.0 ** (n - 1) - 1.0) + 2.0 * binary_entropy(y) - (n - 2)


@lru_cache(maxsize=None)
def p01_min(n: int, tol: float = 1e-12) -> float:
    """Smallest admissible mean double-click probability for n photons.

    The unique root in (0, 1/2) of ``doubleclick_slack(n, y) = 0``,
    located by bisection to absolute tolerance ``tol``.  Bisection is
    preferred over Newton steps because the residual is monotone on the
    bracket, so convergence is unconditional.  The value is nondecreasing
    in ``n`` for ``n >= 3``.
    """
    if n < 3:
        raise ValueError(f"n = {n} must be >= 3")
    lo, hi = 0.0, 0.5
    # residual is -(n-2) < 0 at y=0 and log2(2^(n-1)-1) + 4 - n > 0 at y=1/2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if doubleclick_slack(n, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
