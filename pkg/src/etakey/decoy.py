"""Decoy-intensity estimators for weak-coherent-pulse sources.

With a phase-randomized source the sender emits Poissonian photon
numbers, so the observed per-intensity rates are Poisson mixtures of
unknown per-photon-number yields.  One signal and two weaker decoy
intensities suffice to bound the single-photon slices: the detection and
detector-1 gains from below, the weighted x-basis error rate from above.
The bounds hold for arbitrary yields (no assumption on the detectors at
all), so they survive efficiency mismatch unchanged; the double-click
rate needs no estimate because the whole signal-gain value is already a
valid cap for its single-photon slice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .keyrate import (
    KeyRateResult,
    Observables,
    STATUS_ABORT_NO_SINGLE_PHOTON,
    STATUS_FEASIBLE,
    minimize_objective,
)
from .scalarmath import binary_entropy, validate_eta, validate_probability

_LABELS = ("signal", "decoy1", "decoy2")


@dataclass(frozen=True)
class IntensityRecord:
    """Observed rates for one pulse intensity.

    ``q0`` and ``q1_frac`` are the weighted per-pulse rates of erroneous
    0 and erroneous 1 outcomes when both parties use the x basis; the
    estimator algebra needs rates (not ratios), matching the weighted
    error observable of the key-rate engine.
    """

    label: str
    mu: float
    p_det: float
    p_1: float
    p_01: float
    q0: float
    q1_frac: float

    def __post_init__(self) -> None:
        if self.label not in _LABELS:
            raise ValueError(f"label = {self.label!r} must be one of {_LABELS}")
        if self.mu < 0.0:
            raise ValueError(f"mu = {self.mu!r} must be >= 0")
        validate_probability(self.p_det, "p_det")
        validate_probability(self.p_1, "p_1")
        validate_probability(self.p_01, "p_01")
        if self.q0 < 0.0 or self.q1_frac < 0.0:
            raise ValueError("error rates q0, q1 must be >= 0")
        if self.p_1 > self.p_det + 1e-12:
            raise ValueError(f"p_1 = {self.p_1!r} violates p_1 <= p_det")


@dataclass(frozen=True)
class DecoyInputs:
    """Signal plus two decoy records with ordered intensities."""

    signal: IntensityRecord
    decoy1: IntensityRecord
    decoy2: IntensityRecord
    eta: float

    def __post_init__(self) -> None:
        validate_eta(self.eta)
        mu, nu1, nu2 = self.signal.mu, self.decoy1.mu, self.decoy2.mu
        if not (0.0 <= nu2 < nu1):
            raise ValueError(f"intensities violate 0 <= nu2 < nu1 (nu1={nu1!r}, nu2={nu2!r})")
        if not (nu1 + nu2 < mu):
            raise ValueError(f"intensities violate nu1 + nu2 < mu (mu={mu!r}, nu1={nu1!r}, nu2={nu2!r})")


@dataclass(frozen=True)
class DecoyEstimates:
    """Single-photon-slice bounds produced from the three records."""

    pdet_single_l: float
    p1_single_l: float
    q_single_u: float
    y0_detect_l: float
    y0_click1_l: float


def _y0_from_gains(gain1: float, gain2: float, nu1: float, nu2: float) -> float:
    return max((nu1 * gain2 * math.exp(nu2) - nu2 * gain1 * math.exp(nu1)) / (nu1 - nu2), 0.0)


def y0_lower(d: DecoyInputs) -> float:
    """Vacuum-yield lower bound from the two decoy detection gains.

    With a vacuum decoy (``nu2 = 0``) this reduces to the measured
    vacuum gain itself.
    """
    nu1, nu2 = d.decoy1.mu, d.decoy2.mu
    if nu1 == nu2:
        raise ValueError("nu1 == nu2: vacuum-yield bound undefined")
    return _y0_from_gains(d.decoy1.p_det, d.decoy2.p_det, nu1, nu2)


def single_gain_lower(d: DecoyInputs, channel: str = "detect") -> float:
    """Lower bound on the single-photon slice of a signal gain.

    ``channel='detect'`` bounds the joint probability that a signal
    pulse holds one photon and produces a detection; ``channel='click1'``
    does the same for lone detector-1 clicks.  The correction bracket
    uses the observed total signal gain times ``e^mu`` (together with the
    vacuum-yield bound), and the result is clamped to be nonnegative.
    """
    if channel == "detect":
        key = lambda r: r.p_det  # noqa: E731
    elif channel == "click1":
        key = lambda r: r.p_1  # noqa: E731
    else:
        raise ValueError(f"channel = {channel!r} must be 'detect' or 'click1'")
    mu, nu1, nu2 = d.signal.mu, d.decoy1.mu, d.decoy2.mu
    den = mu * nu1 - mu * nu2 - nu1**2 + nu2**2
    if den <= 0.0:
        raise ValueError("nonpositive denominator: intensities violate nu1 + nu2 < mu")
    y0 = _y0_from_gains(key(d.decoy1), key(d.decoy2), nu1, nu2)
    bracket = (
        key(d.decoy1) * math.exp(nu1)
        - key(d.decoy2) * math.exp(nu2)
        - (nu1**2 - nu2**2) / mu**2 * (key(d.signal) * math.exp(mu) - y0)
    )
    return max(mu**2 * math.exp(-mu) / den * bracket, 0.0)


def single_q_upper(d: DecoyInputs) -> float:
    """Upper bound on the single-photon weighted x-basis error rate.

    Every photon-number slice of the weighted error rate is nonnegative,
    so the difference of the two decoy error rates already majorizes the
    single-photon term.  Clamped to be nonnegative.
    """
    nu1, nu2 = d.decoy1.mu, d.decoy2.mu
    if nu1 == nu2:
        raise ValueError("nu1 == nu2: error bound undefined")
    mu = d.signal.mu
    val = (
        (d.decoy1.q0 + d.decoy1.q1_frac / d.eta) * math.exp(nu1)
        - (d.decoy2.q0 + d.decoy2.q1_frac / d.eta) * math.exp(nu2)
    ) * mu * math.exp(-mu) / (nu1 - nu2)
    return max(val, 0.0)


def decoy_estimates(d: DecoyInputs) -> DecoyEstimates:
    """All single-photon-slice bounds in one record."""
    return DecoyEstimates(
        pdet_single_l=single_gain_lower(d, "detect"),
        p1_single_l=single_gain_lower(d, "click1"),
        q_single_u=single_q_upper(d),
        y0_detect_l=y0_lower(d),
        y0_click1_l=_y0_from_gains(d.decoy1.p_1, d.decoy2.p_1, d.decoy1.mu, d.decoy2.mu),
    )


def decoy_keyrate(d: DecoyInputs, q_z: float) -> KeyRateResult:
    """Key-rate lower bound for a decoy-estimated weak-coherent source.

    Runs the multiphoton engine on the substituted observables (the
    single-photon gain floors, the error cap, and the raw signal
    double-click rate as the conservative cap for its single-photon
    slice), then charges error correction on the full signal gain:
    ``K = min f - p_det(signal) * h(q_z)``.
    """
    q_z = validate_probability(q_z, "q_z")
    est = decoy_estimates(d)
    p_det = est.pdet_single_l
    p_01 = d.signal.p_01
    if p_det <= 0.0 or p_01 > p_det:
        # the 3+-photon cap would already exceed every certified detection
        return KeyRateResult(0.0, math.nan, STATUS_ABORT_NO_SINGLE_PHOTON)
    obs = Observables(
        eta=d.eta,
        p_det=p_det,
        p_1=min(est.p1_single_l, p_det),
        q=est.q_single_u,
        p_01=p_01,
        q_z=q_z,
    )
    fmin, argmin, status = minimize_objective(obs)
    if status != STATUS_FEASIBLE:
        return KeyRateResult(0.0, argmin, status)
    k = fmin - d.signal.p_det * binary_entropy(q_z)
    return KeyRateResult(max(k, 0.0), argmin, status)
