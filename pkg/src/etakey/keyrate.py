"""Certified secret-key-rate lower bounds under detector-efficiency mismatch.

The engine takes five z/x-basis rates measured on the raw channel (the
detection probability, the detector-1 single-click probability, the
weighted x-basis error rate, the mean double-click probability, and the
z-basis error ratio) together with the efficiency ratio ``eta``, and
returns a lower bound on the asymptotic secret-key rate that holds for
arbitrary multiphoton inputs at the receiver.

The route: the double-click rate caps how much three-or-more-photon
weight the state can carry; a fidelity argument bounds the two-photon
contributions in terms of the free parameter ``pdet2`` (the two-photon
share of the detection rate); what remains pins down the single-photon
observables, for which a tight entropic bound is known.  The final bound
is the minimum of a convex function of ``pdet2`` over an explicitly
computable segment, located here by golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scalarmath import (
    binary_entropy,
    p01_min,
    theta,
    validate_eta,
    validate_probability,
)

STATUS_FEASIBLE = "feasible"
STATUS_ABORT_ERROR_RATE = "abort_error_rate"
STATUS_ABORT_NO_SINGLE_PHOTON = "abort_no_single_photon"

_GOLDEN_TOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Observables:
    """The measured rates feeding the multiphoton bound.

    ``q`` is the weighted mean erroneous detection rate in the x basis
    (erroneous detector-1 outcomes carry weight ``1/eta``), which is a
    weighted probability rather than an error ratio and may exceed the
    usual error-rate scale.  ``q_z`` is the plain z-basis error ratio
    used for the error-correction term.
    """

    eta: float
    p_det: float
    p_1: float
    q: float
    p_01: float
    q_z: float

    def __post_init__(self) -> None:
        validate_eta(self.eta)
        validate_probability(self.p_det, "p_det")
        validate_probability(self.p_1, "p_1")
        validate_probability(self.p_01, "p_01")
        validate_probability(self.q_z, "q_z")
        if self.q < 0.0:
            raise ValueError(f"q = {self.q!r} violates q >= 0")
        if self.p_1 > self.p_det + 1e-12:
            raise ValueError(f"p_1 = {self.p_1!r} violates p_1 <= p_det = {self.p_det!r}")
        if self.p_01 > self.p_det + 1e-12:
            raise ValueError(f"p_01 = {self.p_01!r} violates p_01 <= p_det = {self.p_det!r}")


@dataclass(frozen=True)
class DerivedBounds:
    """Intermediate bounds at a fixed two-photon detection share."""

    pdet2: float
    pdet3plus_u: float
    pdet1_l: float
    p1_2_u: float
    p1_1_l: float
    t1_l: float
    q2_l: float
    q1_u: float
    delta_x_l: float


@dataclass(frozen=True)
class DeltaPair:
    """Bias parameters of an attenuated single-photon state."""

    delta_z: float
    delta_x: float

    def __post_init__(self) -> None:
        if abs(self.delta_z) > 1.0 + 1e-10:
            raise ValueError(f"delta_z = {self.delta_z!r} violates |delta_z| <= 1")
        if abs(self.delta_x) > 1.0 + 1e-10:
            raise ValueError(f"delta_x = {self.delta_x!r} violates |delta_x| <= 1")
        if self.delta_x**2 + self.delta_z**2 > 1.0 + 1e-10:
            raise ValueError("delta_x^2 + delta_z^2 exceeds 1")


@dataclass(frozen=True)
class KeyRateResult:
    k_bound: float
    argmin_pdet2: float
    status: str


def _bound_chain(
    obs: Observables, pdet2: float, minus_sign_t1: bool = False
) -> tuple[float, float, float, float, float, float, float]:
    """Division-free part of the bound chain; see :func:`derive_bounds`."""
    eta = obs.eta
    th2 = theta(eta, 2)
    pdet3plus_u = obs.p_01 / (eta * p01_min(3))
    pdet1_l = obs.p_det - pdet2 - pdet3plus_u
    root = math.sqrt(2.0 * obs.p_01 * pdet2 / (eta * th2))
    p1_2_u = min(pdet2 / 2.0 + root, pdet2)
    p1_1_l = obs.p_1 - p1_2_u - pdet3plus_u
    sign = -1.0 if minus_sign_t1 else 1.0
    t1_l = pdet1_l + sign * (1.0 / eta - 1.0) * p1_1_l
    q2_l = (1.0 + th2) * pdet2 / 4.0 - root
    q1_u = obs.q - q2_l
    return pdet3plus_u, pdet1_l, p1_2_u, p1_1_l, t1_l, q2_l, q1_u


def derive_bounds(obs: Observables, pdet2: float, minus_sign_t1: bool = False) -> DerivedBounds:
    """Bound chain at a hypothesized two-photon detection share ``pdet2``.

    Computes, in order: the three-plus-photon cap from the double-click
    rate, the single-photon detection floor, the two-photon cap on
    detector-1 single clicks (additionally clamped to ``pdet2``, which is
    always valid), the single-photon detector-1 floor, the
    perfect-detection rate floor ``t1_l``, the two-photon error floor
    ``q2_l``, the single-photon error cap ``q1_u = q - q2_l``, and the
    phase-bias floor ``delta_x_l``.

    ``t1_l`` uses the plus sign, ``pdet1_l + (1/eta - 1) * p1_1_l``: the
    per-sector accounting ``t1 = pdet1 + (1/eta - 1) * p1_1`` holds
    exactly for single photons, so replacing both terms by their floors
    is the only direction-consistent lower bound.  ``minus_sign_t1``
    switches to the minus-sign variant for comparison only; it is not a
    valid lower bound.

    Raises ``ValueError`` when ``pdet1_l <= 0`` (no certified
    single-photon contribution; the engine reports this as an abort).
    """
    if not (0.0 <= pdet2 <= obs.p_det + 1e-12):
        raise ValueError(f"pdet2 = {pdet2!r} outside [0, p_det]")
    pdet3plus_u, pdet1_l, p1_2_u, p1_1_l, t1_l, q2_l, q1_u = _bound_chain(
        obs, pdet2, minus_sign_t1
    )
    if pdet1_l <= 0.0:
        raise ValueError("pdet1_l <= 0: no single-photon contribution at this pdet2")
    delta_x_l = math.sqrt(obs.eta) * (t1_l - 2.0 * q1_u) / pdet1_l
    return DerivedBounds(
        pdet2=pdet2,
        pdet3plus_u=pdet3plus_u,
        pdet1_l=pdet1_l,
        p1_2_u=p1_2_u,
        p1_1_l=p1_1_l,
        t1_l=t1_l,
        q2_l=q2_l,
        q1_u=q1_u,
        delta_x_l=delta_x_l,
    )


def _pdet2_cap(obs: Observables) -> float:
    """Hard upper end of the segment: all detections minus the 3+ cap."""
    return obs.p_det - obs.p_01 / (obs.eta * p01_min(3))


def _constraint_residual(obs: Observables, pdet2: float) -> float:
    """Residual of the bias constraint, without the single-click clamp.

    Negative or zero means ``delta_x_l <= 1`` at this ``pdet2``.  The
    clamp on ``p1_2_u`` is omitted so that the residual is exactly the
    quadratic polynomial in ``sqrt(pdet2)`` solved in closed form by
    :func:`pdet2_upper_quadratic`.
    """
    eta = obs.eta
    th2 = theta(eta, 2)
    beta = 1.0 / eta - 1.0
    eps = obs.p_01 / (eta * p01_min(3))
    pdet1_l = obs.p_det - pdet2 - eps
    root = math.sqrt(2.0 * obs.p_01 * pdet2 / (eta * th2))
    p1_1_l = obs.p_1 - (pdet2 / 2.0 + root) - eps
    t1_l = pdet1_l + beta * p1_1_l
    q1_u = obs.q - ((1.0 + th2) * pdet2 / 4.0 - root)
    return math.sqrt(eta) * (t1_l - 2.0 * q1_u) - pdet1_l


def pdet2_upper(obs: Observables) -> float:
    """Upper endpoint of the minimization segment, by bisection.

    Largest ``pdet2`` in ``[0, p_det - pdet3plus_u]`` at which the
    certified phase bias still satisfies ``delta_x_l <= 1``; beyond it no
    positive state is compatible with the hypothesized two-photon share.
    The residual crosses zero at most once on the bracket, so bisection
    to width 1e-12 is exact for our purposes.  Returns 0 when the
    constraint already binds at ``pdet2 = 0``.
    """
    cap = _pdet2_cap(obs)
    if cap <= 0.0:
        return 0.0
    if _constraint_residual(obs, 0.0) > 0.0:
        return 0.0
    if _constraint_residual(obs, cap) <= 0.0:
        return cap
    lo, hi = 0.0, cap
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _constraint_residual(obs, mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def pdet2_upper_quadratic(obs: Observables) -> float:
    """Closed-form segment endpoint: the constraint is quadratic in sqrt(pdet2).

    Independent cross-check for :func:`pdet2_upper`; both must agree to
    high accuracy on any valid input.
    """
    eta = obs.eta
    th2 = theta(eta, 2)
    beta = 1.0 / eta - 1.0
    se = math.sqrt(eta)
    eps = obs.p_01 / (eta * p01_min(3))
    cap = obs.p_det - eps
    if cap <= 0.0:
        return 0.0
    big_c = cap
    big_d = obs.p_1 - eps
    a = math.sqrt(2.0 * obs.p_01 / (eta * th2))
    # residual = alpha * s^2 - gam * s + c with s = sqrt(pdet2)
    const = se * (big_c + beta * big_d - 2.0 * obs.q) - big_c
    alpha = 1.0 + se * (-1.0 - beta / 2.0 + (1.0 + th2) / 2.0)
    gam = se * a * (beta + 2.0)
    if const > 0.0:
        return 0.0
    if alpha <= 0.0:
        return cap  # residual stays nonpositive on the whole bracket
    s = (gam + math.sqrt(gam * gam - 4.0 * alpha * const)) / (2.0 * alpha)
    return min(cap, s * s)


def _golden_section(f, a: float, b: float, tol: float = _GOLDEN_TOL) -> float:
    """Golden-section minimizer of a unimodal function on [a, b].

    Chosen over derivative-based searches because the key-rate objective
    has a diverging slope where the certified bias approaches 1.
    Shrinks the bracket to width ``tol`` and returns its midpoint; the
    caller is expected to compare against the endpoint values itself.
    """
    if b <= a:
        return a
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _error_margin(obs: Observables, pdet2: float) -> float:
    """``t1_l - 2 * q1_u``; must stay positive on the whole segment."""
    _, _, _, _, t1_l, _, q1_u = _bound_chain(obs, pdet2)
    return t1_l - 2.0 * q1_u


def _objective(obs: Observables, pdet2: float) -> float:
    """The quantity minimized over the segment (before error correction).

    ``pdet1_l * [1 - h((1 - delta_x_l)/2)]``.  The bias is clipped to 1
    from above: a value beyond 1 certifies that this ``pdet2`` is
    incompatible with any positive state, so raising the objective there
    never affects the validity of the minimum.  At the segment endpoint
    where ``pdet1_l`` vanishes the objective is its limit, zero.
    """
    _, pdet1_l, _, _, t1_l, _, q1_u = _bound_chain(obs, pdet2)
    if pdet1_l <= 1e-15:
        return 0.0
    delta = min(math.sqrt(obs.eta) * (t1_l - 2.0 * q1_u) / pdet1_l, 1.0)
    x = min(max((1.0 - delta) / 2.0, 0.0), 1.0)
    return pdet1_l * (1.0 - binary_entropy(x))


def minimize_objective(obs: Observables) -> tuple[float, float, str]:
    """Minimize the pre-error-correction objective over the segment.

    Verifies the error-margin condition ``q1_u < t1_l / 2`` at both
    segment endpoints and at its interior minimizer (sufficient because
    the margin is convex in ``pdet2``), then minimizes the objective by
    golden-section search with endpoint evaluation.  Returns
    ``(min f, argmin, status)``; the minimum is meaningful only for the
    feasible status.
    """
    if _pdet2_cap(obs) <= 0.0:
        return 0.0, math.nan, STATUS_ABORT_NO_SINGLE_PHOTON
    cap = pdet2_upper(obs)

    def margin(p2: float) -> float:
        return _error_margin(obs, p2)

    probes = [0.0, cap]
    if cap > 0.0:
        probes.append(_golden_section(margin, 0.0, cap))
    if min(margin(p) for p in probes) <= 0.0:
        return 0.0, math.nan, STATUS_ABORT_ERROR_RATE

    def f(p2: float) -> float:
        return _objective(obs, p2)

    candidates = [0.0, cap]
    if cap > 0.0:
        candidates.append(_golden_section(f, 0.0, cap))
    fmin, argmin = min((f(p), p) for p in candidates)
    return fmin, argmin, STATUS_FEASIBLE


def keyrate_multiphoton(obs: Observables) -> KeyRateResult:
    """Secret-key-rate lower bound valid for multiphoton receiver inputs.

    The minimized objective minus the error-correction term
    ``p_det * h(q_z)``.  A negative bound is clamped to zero; the abort
    statuses mark runs where no key can be certified at all.
    """
    fmin, argmin, status = minimize_objective(obs)
    if status != STATUS_FEASIBLE:
        return KeyRateResult(0.0, argmin, status)
    k = fmin - obs.p_det * binary_entropy(obs.q_z)
    return KeyRateResult(max(k, 0.0), argmin, status)


def keyrate_single_tight(p_det: float, deltas: DeltaPair) -> float:
    """Exact key rate when the receiver input is a single photon.

    ``p_det * [h((1-delta_z)/2) - h((1-r)/2)]`` with
    ``r = sqrt(delta_x^2 + delta_z^2)``.  No error-correction term is
    included; the expression serves as the upper reference curve.
    """
    p_det = validate_probability(p_det, "p_det")
    r2 = deltas.delta_x**2 + deltas.delta_z**2
    if r2 > 1.0 + 1e-10:
        raise ValueError(f"delta_x^2 + delta_z^2 = {r2!r} exceeds 1")
    r = min(math.sqrt(r2), 1.0)
    return p_det * (
        binary_entropy((1.0 - deltas.delta_z) / 2.0) - binary_entropy((1.0 - r) / 2.0)
    )


def keyrate_single_simple(p_det: float, delta_x: float) -> float:
    """Rougher single-photon bound ``p_det * [1 - h((1-delta_x)/2)]``.

    Coincides with :func:`keyrate_single_tight` at ``delta_z = 0``; this
    is the shape the multiphoton engine optimizes.
    """
    p_det = validate_probability(p_det, "p_det")
    if abs(delta_x) > 1.0 + 1e-10:
        raise ValueError(f"delta_x = {delta_x!r} violates |delta_x| <= 1")
    delta_x = min(max(delta_x, -1.0), 1.0)
    return p_det * (1.0 - binary_entropy((1.0 - delta_x) / 2.0))


def keyrate_no_mismatch(p_det: float, q: float) -> float:
    """Reference rate for equal efficiencies: ``p_det * (1 - 2 h(Q))``, floored at 0."""
    p_det = validate_probability(p_det, "p_det")
    q = validate_probability(q, "Q")
    if q > 0.5:
        raise ValueError(f"Q = {q!r} violates Q <= 1/2")
    return max(p_det * (1.0 - 2.0 * binary_entropy(q)), 0.0)


def deltas_from_single_obs(
    pdet1: float, p1_1: float, t1: float, q1: float, eta: float
) -> DeltaPair:
    """Bias parameters from exact single-photon observables.

    ``delta_z = (pdet1 - 2 p1_1)/pdet1`` (detector-0 clicks are
    ``pdet1 - p1_1``) and ``delta_x = sqrt(eta) (t1 - 2 q1)/pdet1``.
    """
    eta = validate_eta(eta)
    if pdet1 <= 0.0:
        raise ValueError(f"pdet1 = {pdet1!r} must be > 0")
    if p1_1 > pdet1 + 1e-12:
        raise ValueError(f"p1_1 = {p1_1!r} violates p1_1 <= pdet1")
    return DeltaPair(
        delta_z=(pdet1 - 2.0 * p1_1) / pdet1,
        delta_x=math.sqrt(eta) * (t1 - 2.0 * q1) / pdet1,
    )
