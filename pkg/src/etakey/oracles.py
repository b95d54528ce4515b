"""Randomized brute-force verification of the bounds behind the engine.

Every analytic ingredient of the key-rate bound is checked here against
direct numerics on small photon-number sectors: the entropic
double-click floor, the qubit-string uncertainty relation it rests on,
the tight single-photon entropy bound together with its extremal family,
the two-photon error and single-click bounds, the concavity lemma that
certifies the one-dimensional search, the monotonicity of the
double-click root, and the detector-model operator identities.

All suites are deterministic: trial ``t`` of a run seeded with ``s``
draws from a generator keyed by ``(s, t)``, so reruns reproduce the
reports bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from . import keyrate as kr
from .fock import basis_change, build_povm, conditional_entropy_xb, von_neumann_entropy
from .scalarmath import binary_entropy, doubleclick_slack, p01_min, theta

_PPLUS = np.full((2, 2), 0.5)
_PMINUS = np.array([[0.5, -0.5], [-0.5, 0.5]])
_PAULI_Z = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class TrialReport:
    """Outcome of one randomized suite."""

    suite: str
    trials: int
    worst_slack: float
    violations: int
    seed: int

    def line(self) -> str:
        return (
            f"{self.suite:<22s} trials={self.trials:<6d} violations={self.violations:<4d} "
            f"worst_slack={self.worst_slack:+.6e} seed={self.seed}"
        )


def _rng(seed: int, trial: int) -> np.random.Generator:
    # per-trial stream keyed on (seed, trial index): deterministic and
    # safe to evaluate in any order
    return np.random.default_rng([seed, trial])


def sample_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix from a complex Gaussian square.

    ``G G^dag / Tr(G G^dag)`` with i.i.d. standard complex Gaussian
    entries; full rank with probability one.
    """
    if dim < 1:
        raise ValueError(f"dim = {dim} must be >= 1")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _mean_doubleclick_op(n: int) -> np.ndarray:
    pz = build_povm(n, 1.0, "z", perfect=True)
    px = build_povm(n, 1.0, "x", perfect=True)
    return 0.5 * (pz.p_01 + px.p_01)


def check_lemma4(n: int, trials: int = 1000, seed: int = 0) -> TrialReport:
    """Entropic floor on the mean perfect double-click probability.

    For random n-photon states (n >= 3) asserts
    ``2 p * log2(2^(n-1)-1) + 2 h(p) >= n - 2`` for the mean two-basis
    double-click probability ``p`` under perfect detection, and that
    ``p`` never drops below the root ``p01_min(n)``.
    """
    if not 3 <= n <= 6:
        raise ValueError(f"n = {n} must be in [3, 6]")
    op = _mean_doubleclick_op(n)
    floor = p01_min(n)
    worst = math.inf
    violations = 0
    for t in range(trials):
        rho = sample_density(n + 1, _rng(seed, t))
        p = float(np.trace(rho @ op).real)
        s1 = doubleclick_slack(n, p)
        s2 = p - floor
        worst = min(worst, s1, s2)
        if s1 < -1e-9 or s2 < -1e-9:
            violations += 1
    return TrialReport(f"lemma4[n={n}]", trials, worst, violations, seed)


def _symmetric_embedding(n: int) -> np.ndarray:
    """Isometry from the (n+1)-dim sector into the 2^n qubit string space.

    Basis vector ``i`` (i photons at detector 1) maps to the normalized
    uniform superposition of all Hamming-weight-i strings.
    """
    v = np.zeros((2**n, n + 1))
    for a in range(2**n):
        k = bin(a).count("1")
        v[a, k] = 1.0
    for k in range(n + 1):
        v[:, k] /= math.sqrt(comb(n, k))
    return v


def _hadamard_power(n: int) -> np.ndarray:
    h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    out = h1
    for _ in range(n - 1):
        out = np.kron(out, h1)
    return out


def _shannon(p: np.ndarray) -> float:
    p = p[p > 1e-16]
    return float(-np.sum(p * np.log2(p)))


def check_eur(n: int, trials: int = 500, seed: int = 0) -> TrialReport:
    """Uncertainty relation H(Z) + H(X) >= n for conjugate string readouts.

    Random sector states are embedded into the 2^n qubit string space,
    where the two measurements are the computational readout and its
    Hadamard conjugate.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"n = {n} must be in [1, 6]")
    v = _symmetric_embedding(n)
    hn = _hadamard_power(n)
    worst = math.inf
    violations = 0
    for t in range(trials):
        rho = sample_density(n + 1, _rng(seed, t))
        big = v @ rho @ v.conj().T
        hz = _shannon(np.clip(np.diag(big).real, 0.0, None))
        hx = _shannon(np.clip(np.diag(hn @ big @ hn).real, 0.0, None))
        slack = hz + hx - n
        worst = min(worst, slack)
        if slack < -1e-9:
            violations += 1
    return TrialReport(f"eur[n={n}]", trials, worst, violations, seed)


def _single_photon_cq(rng: np.random.Generator, twirl: bool) -> np.ndarray:
    """Random single-photon sender-measured joint state, trace <= 1."""
    rp = sample_density(2, rng)
    rm = sample_density(2, rng)
    if twirl:
        rp, rm = (rp + _PAULI_Z @ rm @ _PAULI_Z) / 2.0, (rm + _PAULI_Z @ rp @ _PAULI_Z) / 2.0
    t1 = rng.uniform(0.1, 1.0)
    return t1 * (np.kron(_PPLUS, rp) + np.kron(_PMINUS, rm)) / 2.0


def _single_photon_observables(rho_xb: np.ndarray, eta: float):
    pz = build_povm(1, eta, "z")
    px = build_povm(1, eta, "x")
    eye2 = np.eye(2)
    t1 = float(np.trace(rho_xb).real)
    rb = rho_xb[:2, :2] + rho_xb[2:, 2:]
    pdet1 = float(np.trace(rb @ (eye2 - pz.p_empty)).real)
    p1_1 = float(np.trace(rb @ pz.p_1).real)
    gamma2 = np.kron(_PPLUS, px.p_1 / eta) + np.kron(_PMINUS, px.p_0)
    q1 = float(np.trace(rho_xb @ gamma2).real)
    return t1, pdet1, p1_1, q1


def _attenuated_conditional_entropy(rho_xb: np.ndarray, eta: float) -> float:
    g1 = np.kron(np.eye(2), np.diag([1.0, math.sqrt(eta)]))
    att = g1 @ rho_xb @ g1
    return conditional_entropy_xb(att / np.trace(att).real)


def _tight_entropy_bound(delta_z: float, delta_x: float) -> float:
    r = min(math.sqrt(delta_x**2 + delta_z**2), 1.0)
    return binary_entropy((1.0 - r) / 2.0) + 1.0 - binary_entropy((1.0 - delta_z) / 2.0)


def _extremal_single_photon(delta_z: float, delta_x: float, eta: float, pdet1: float = 0.3):
    """The family saturating the tight single-photon bound.

    Built so that the attenuated state is exactly the bias matrix
    ``(pdet1/2) [[1+dz, dx], [dx, 1-dz]]`` together with its phase-flip
    partner.
    """
    m = (pdet1 / 2.0) * np.array([[1.0 + delta_z, delta_x], [delta_x, 1.0 - delta_z]])
    ginv = np.diag([1.0, 1.0 / math.sqrt(eta)])
    rp = ginv @ m @ ginv
    rm = _PAULI_Z @ rp @ _PAULI_Z
    return 0.5 * (np.kron(_PPLUS, rp) + np.kron(_PMINUS, rm))


def check_prop3(trials: int = 1000, seed: int = 0, twirl: bool = False) -> TrialReport:
    """Tight single-photon entropy bound plus its extremal family.

    (a) For random single-photon joint states the conditional entropy of
    the attenuated state never exceeds
    ``h((1-r)/2) + 1 - h((1-delta_z)/2)`` with the biases read off from
    the detection observables.  (b) On a grid of bias pairs the extremal
    family attains the bound exactly.
    """
    worst = math.inf
    violations = 0
    for t in range(trials):
        rng = _rng(seed, t)
        eta = rng.uniform(0.3, 1.0)
        rho = _single_photon_cq(rng, twirl)
        t1, pdet1, p1_1, q1 = _single_photon_observables(rho, eta)
        deltas = kr.deltas_from_single_obs(pdet1, p1_1, t1, q1, eta)
        bound = _tight_entropy_bound(deltas.delta_z, deltas.delta_x)
        slack = bound - _attenuated_conditional_entropy(rho, eta)
        worst = min(worst, slack)
        if slack < -1e-8:
            violations += 1
    # extremal grid: equality within 1e-8 wherever the biases are physical
    grid = np.linspace(-1.0, 1.0, 9)
    for dz in grid:
        for dx in grid:
            if dz * dz + dx * dx > 1.0:
                continue
            for eta in (0.7, 1.0):
                rho = _extremal_single_photon(dz, dx, eta)
                h_true = _attenuated_conditional_entropy(rho, eta)
                gap = abs(h_true - _tight_entropy_bound(dz, dx))
                worst = min(worst, 1e-8 - gap)
                if gap > 1e-8:
                    violations += 1
    return TrialReport("prop3", trials, worst, violations, seed)


def check_prop4(trials: int = 1000, seed: int = 0) -> TrialReport:
    """Two-photon error floor and single-click cap, plus the anchor state.

    For random two-photon sender-measured states at eta in {0.5, 0.9}:
    ``q2/t2 >= (1+theta2)/4 - sqrt(p01/(eta t2))`` and
    ``p1(2)/t2 <= theta2/2 + sqrt(p01/(eta t2))``, checked for the
    weighted error rate (the engine's observable).  Also asserts the
    derived forms consumed by the engine, ``q2_l <= q2`` and
    ``p1(2) <= p1_2_u`` at the state's own two-photon detection share.

    The anchor: for the sender-uncorrelated two-photon Bell state the
    unweighted error rate equals ``(1+theta2)/4`` and the detector-1
    click rate equals ``theta2/2`` exactly, with no double clicks.  (The
    weighted rate evaluates to ``(3-eta)/4``; the bound, anchored below
    it, holds for both.)
    """
    worst = math.inf
    violations = 0

    def sector2_quantities(rp, rm, eta, t2):
        pz = build_povm(2, eta, "z")
        px = build_povm(2, eta, "x")
        rb = t2 * (rp + rm) / 2.0
        q2_w = t2 * 0.5 * (
            np.trace(rp @ (px.p_1 + px.p_01 / 2.0)).real / eta
            + np.trace(rm @ (px.p_0 + px.p_01 / 2.0)).real
        )
        p12 = float(np.trace(rb @ pz.p_1).real)
        p01 = float(np.trace(rb @ (0.5 * (pz.p_01 + px.p_01))).real)
        pdet2 = float(np.trace(rb @ (np.eye(3) - pz.p_empty)).real)
        return float(q2_w), p12, p01, pdet2

    per_eta = trials // 2
    for j, eta in enumerate((0.5, 0.9)):
        th2 = theta(eta, 2)
        for t in range(per_eta):
            rng = _rng(seed, j * per_eta + t)
            rp = sample_density(3, rng)
            rm = sample_density(3, rng)
            t2 = rng.uniform(0.05, 1.0)
            q2, p12, p01, pdet2 = sector2_quantities(rp, rm, eta, t2)
            root = math.sqrt(p01 / (eta * t2))
            s1 = q2 / t2 - ((1.0 + th2) / 4.0 - root)
            s2 = (th2 / 2.0 + root) - p12 / t2
            # derived forms at the state's own two-photon detection share
            root2 = math.sqrt(2.0 * p01 * pdet2 / (eta * th2))
            s3 = q2 - ((1.0 + th2) * pdet2 / 4.0 - root2)
            s4 = min(pdet2 / 2.0 + root2, pdet2) - p12
            worst = min(worst, s1, s2, s3, s4)
            if min(s1, s2, s3, s4) < -1e-9:
                violations += 1

    # anchor state: sender maximally mixed, receiver in the two-photon
    # Bell state that clicks both detectors in neither basis
    phi = np.zeros(3)
    phi[0] = phi[2] = 1.0 / math.sqrt(2.0)
    bell = np.outer(phi, phi)
    for eta in (0.5, 0.9):
        th2 = theta(eta, 2)
        px = build_povm(2, eta, "x")
        pz = build_povm(2, eta, "z")
        q2_unweighted = 0.5 * (
            np.trace(bell @ (px.p_1 + px.p_01 / 2.0)).real
            + np.trace(bell @ (px.p_0 + px.p_01 / 2.0)).real
        )
        p12 = float(np.trace(bell @ pz.p_1).real)
        p01 = float(np.trace(bell @ (0.5 * (pz.p_01 + px.p_01))).real)
        for gap in (
            abs(q2_unweighted - (1.0 + th2) / 4.0),
            abs(p12 - th2 / 2.0),
            abs(p01),
        ):
            worst = min(worst, 1e-10 - gap)
            if gap > 1e-10:
                violations += 1
    return TrialReport("prop4", trials, worst, violations, seed)


def _sample_concave_test_fn(rng: np.random.Generator):
    """Random convex quadratic g on a random segment with 0 <= g/x <= 1/2."""
    for _ in range(200):
        x0 = rng.uniform(0.1, 1.0)
        x1 = x0 + rng.uniform(0.1, 1.0)
        g0 = rng.uniform(0.0, x0 / 2.0)
        g1 = rng.uniform(0.0, x1 / 2.0)
        curvature = rng.uniform(0.0, 2.0)

        def g(x):
            lin = g0 + (g1 - g0) * (x - x0) / (x1 - x0)
            return lin + curvature * (x - x0) * (x - x1)

        xs = np.linspace(x0, x1, 101)
        vals = np.array([g(x) for x in xs])
        if np.all(vals >= 0.0) and np.all(vals <= xs / 2.0):
            return g, x0, x1
    raise RuntimeError("could not sample an admissible convex quadratic")


def _sample_feasible_observables(rng: np.random.Generator) -> kr.Observables | None:
    eta = rng.uniform(0.4, 1.0)
    p_det = rng.uniform(0.3, 1.0)
    p_1 = rng.uniform(0.1, 0.6) * p_det
    q = rng.uniform(0.02, 0.12)
    p_01 = rng.uniform(0.0, 1e-4)
    obs = kr.Observables(eta=eta, p_det=p_det, p_1=p_1, q=q, p_01=p_01, q_z=0.0)
    _, _, status = kr.minimize_objective(obs)
    return obs if status == kr.STATUS_FEASIBLE else None


def check_concavity(trials: int = 200, seed: int = 0) -> TrialReport:
    """Concavity of x*h(1/2 - g(x)/x) for convex g, and objective convexity.

    The first part underpins the claim that the engine's objective is
    convex; the second part checks that convexity directly, by midpoint
    tests on the segment for random feasible observables, which is what
    certifies golden-section search as a global minimizer.
    """
    worst = math.inf
    violations = 0
    for t in range(trials):
        rng = _rng(seed, t)
        g, x0, x1 = _sample_concave_test_fn(rng)

        def f(x):
            return x * binary_entropy(0.5 - g(x) / x)

        for _ in range(50):
            u, v = rng.uniform(x0, x1, 2)
            slack = f((u + v) / 2.0) - (f(u) + f(v)) / 2.0  # concavity
            worst = min(worst, slack)
            if slack < -1e-10:
                violations += 1

        obs = _sample_feasible_observables(rng)
        if obs is None:
            continue
        cap = kr.pdet2_upper(obs)
        if cap <= 0.0:
            continue
        for _ in range(50):
            u, v = rng.uniform(0.0, cap, 2)
            slack = (kr._objective(obs, u) + kr._objective(obs, v)) / 2.0 - kr._objective(
                obs, (u + v) / 2.0
            )  # convexity
            worst = min(worst, slack)
            if slack < -1e-10:
                violations += 1
    return TrialReport("concavity", trials, worst, violations, seed)


def check_p01min_monotone(n_max: int = 12) -> TrialReport:
    """Monotonicity of the double-click root, and bisection validity.

    Asserts ``p01_min(n)`` is nondecreasing on ``3..n_max``, that each
    root zeroes its residual, and that the residual is strictly
    increasing in ``y`` on (0, 1/2) (the bisection bracket).
    """
    worst = math.inf
    violations = 0
    prev = -math.inf
    for n in range(3, n_max + 1):
        root = p01_min(n)
        slacks = [root - prev, 1e-10 - abs(doubleclick_slack(n, root))]
        ys = np.linspace(1e-6, 0.5 - 1e-6, 200)
        vals = np.array([doubleclick_slack(n, y) for y in ys])
        slacks.append(float(np.min(np.diff(vals))))
        worst = min(worst, *slacks)
        if min(slacks) < 0.0:
            violations += 1
        prev = root
    return TrialReport(f"p01min-monotone[3..{n_max}]", n_max - 2, worst, violations, 0)


def check_fock(trials: int = 200, seed: int = 0) -> TrialReport:
    """Detector-model operator identities on sectors up to six photons.

    POVM completeness in both bases, self-inverse unitarity of the basis
    change, and the double-click operator sandwich (perfect majorizes
    imperfect majorizes eta times perfect) as trace inequalities on
    random states.
    """
    worst = math.inf
    violations = 0
    trial = 0
    for n in range(1, 7):
        u = basis_change(n)
        eye = np.eye(n + 1)
        s_unit = 1e-12 - max(
            float(np.max(np.abs(u @ u.conj().T - eye))), float(np.max(np.abs(u @ u - eye)))
        )
        worst = min(worst, s_unit)
        if s_unit < 0.0:
            violations += 1
        for eta in (0.3, 0.7, 1.0):
            for basis in ("z", "x"):
                total = sum(build_povm(n, eta, basis).elements())
                s_comp = 1e-12 - float(np.max(np.abs(total - eye)))
                worst = min(worst, s_comp)
                if s_comp < 0.0:
                    violations += 1
        per_state = max(1, trials // 6)
        for _ in range(per_state):
            rng = _rng(seed, trial)
            trial += 1
            rho = sample_density(n + 1, rng)
            eta = float(rng.uniform(0.1, 1.0))
            for basis in ("z", "x"):
                imperfect = build_povm(n, eta, basis).p_01
                perfect = build_povm(n, eta, basis, perfect=True).p_01
                hi = float(np.trace(rho @ (perfect - imperfect)).real)
                lo = float(np.trace(rho @ (imperfect - eta * perfect)).real)
                worst = min(worst, hi + 1e-12, lo + 1e-12)
                if hi < -1e-12 or lo < -1e-12:
                    violations += 1
    return TrialReport("fock", trials, worst, violations, seed)


def min_double_click(n: int, iterations: int = 400, seed: int = 0) -> float:
    """Numerically minimize the mean perfect double-click probability.

    Random-restart local descent over pure sector states with a
    shrinking perturbation step.  Returns the empirical minimum, which
    must stay above ``p01_min(n)``; the analytic floor is a bound, not
    necessarily attained, so only that direction is asserted by callers.
    """
    if not 3 <= n <= 5:
        raise ValueError(f"n = {n} must be in [3, 5]")
    op = _mean_doubleclick_op(n)

    def value(psi: np.ndarray) -> float:
        return float(np.real(psi.conj() @ op @ psi))

    best = math.inf
    restarts = 8
    for r in range(restarts):
        rng = _rng(seed, r)
        if r == 0:
            psi = np.zeros(n + 1, dtype=complex)
            psi[0] = 1.0  # all photons at detector 0: a cheap known start
        else:
            psi = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
            psi /= np.linalg.norm(psi)
        cur = value(psi)
        step = 0.5
        for it in range(iterations):
            cand = psi + step * (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
            cand /= np.linalg.norm(cand)
            v = value(cand)
            if v < cur:
                psi, cur = cand, v
            else:
                step *= 0.97
        best = min(best, cur)
    return best


def default_suites(trials: int = 500, seed: int = 0) -> list[TrialReport]:
    """The full battery, in a fixed order."""
    reports: list[TrialReport] = []
    for n in (3, 4, 5):
        reports.append(check_lemma4(n, trials, seed))
    for n in (1, 2, 3, 4, 5):
        reports.append(check_eur(n, trials, seed))
    reports.append(check_prop3(trials, seed))
    reports.append(check_prop4(trials, seed))
    reports.append(check_concavity(max(trials // 2, 50), seed))
    reports.append(check_p01min_monotone())
    reports.append(check_fock(trials, seed))
    return reports
