"""Channel models and exact observable extraction.

Two ways to produce the rates the key-rate engine consumes: closed forms
for the standard depolarizing single-photon channel, and exact POVM
traces on an arbitrary photon-number-diagonal joint state.  The second
path doubles as the oracle for the first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import JointState, build_povm
from .keyrate import (
    DeltaPair,
    KeyRateResult,
    Observables,
    deltas_from_single_obs,
    keyrate_multiphoton,
    keyrate_no_mismatch,
    keyrate_single_simple,
    keyrate_single_tight,
)
from .scalarmath import theta, validate_eta, validate_probability

# sender-qubit projectors, z-ordered basis
_P0A = np.diag([1.0, 0.0])
_P1A = np.diag([0.0, 1.0])
_PPLUS = np.full((2, 2), 0.5)
_PMINUS = np.array([[0.5, -0.5], [-0.5, 0.5]])


@dataclass(frozen=True)
class DepolarizingModel:
    """Depolarizing single-photon channel with a double-click override.

    ``qber`` is the depolarizing error weight (the error probability of
    both bases under perfect detection).  A lone photon never fires both
    detectors, so the mean double-click rate is injected via
    ``p01_override`` as a stand-in for dark counts.  ``loss`` is a scalar
    line transmission; it multiplies every rate (and hence the key rate)
    linearly.
    """

    qber: float
    eta: float
    p01_override: float = 1e-5
    loss: float = 1.0

    def __post_init__(self) -> None:
        validate_probability(self.qber, "Q")
        if self.qber > 0.5:
            raise ValueError(f"Q = {self.qber!r} violates Q <= 1/2")
        validate_eta(self.eta)
        validate_probability(self.p01_override, "p01_override")
        validate_probability(self.loss, "loss")


@dataclass(frozen=True)
class SectorStats:
    """Per-photon-number slices of the observables."""

    n: int
    t_n: float
    p_det_n: float
    p1_n: float
    q_n: float
    p01_n: float


def depolarized_observables(model: DepolarizingModel) -> Observables:
    """Closed-form rates of the depolarizing model.

    ``p_det = (1 + eta)/2``, ``p_1 = eta/2``, ``q = Q`` and ``q_z = Q``
    (the weighting and the double-click splitting both collapse for a
    single photon), all scaled by the line transmission.
    """
    t = model.loss
    return Observables(
        eta=model.eta,
        p_det=t * (1.0 + model.eta) / 2.0,
        p_1=t * model.eta / 2.0,
        q=t * model.qber,
        p_01=t * model.p01_override,
        q_z=model.qber,
    )


def depolarized_state(model: DepolarizingModel) -> JointState:
    """The single-photon joint state behind :func:`depolarized_observables`.

    Does not carry the double-click override: one photon produces none.
    """
    phi = np.zeros(4)
    phi[0] = phi[3] = 1.0 / np.sqrt(2.0)
    block = (1.0 - 2.0 * model.qber) * np.outer(phi, phi) + 2.0 * model.qber * np.eye(4) / 4.0
    return JointState(blocks={1: model.loss * block})


def observables_from_state(state: JointState, eta: float) -> tuple[Observables, list[SectorStats]]:
    """Exact observables of a photon-number-diagonal joint state.

    Evaluates per sector: the z-basis detection operator, the weighted
    x-basis error operator (erroneous detector-1 outcomes weighted by
    ``1/eta``, double clicks split evenly between the bit values), the
    detector-1 single-click operator, and the two-basis mean double-click
    operator.  The z-basis error ratio assigns double clicks a random
    bit, so they contribute half their weight to the errors.

    The vacuum block never produces a click and is skipped.
    """
    eta = validate_eta(eta)
    stats: list[SectorStats] = []
    p_det = p_1 = q = p_01 = err = 0.0
    for n in sorted(state.blocks):
        if n == 0:
            continue
        block = state.blocks[n]
        pz = build_povm(n, eta, "z")
        px = build_povm(n, eta, "x")
        eye = np.eye(n + 1)
        detect = eye - pz.p_empty
        gamma2 = np.kron(_PPLUS, (px.p_1 + px.p_01 / 2.0) / eta) + np.kron(
            _PMINUS, px.p_0 + px.p_01 / 2.0
        )
        err_op = np.kron(_P0A, pz.p_1 + pz.p_01 / 2.0) + np.kron(_P1A, pz.p_0 + pz.p_01 / 2.0)
        t_n = float(np.trace(block).real)
        p_det_n = float(np.trace(block @ np.kron(np.eye(2), detect)).real)
        p1_n = float(np.trace(block @ np.kron(np.eye(2), pz.p_1)).real)
        q_n = float(np.trace(block @ gamma2).real)
        p01_n = float(np.trace(block @ np.kron(np.eye(2), (pz.p_01 + px.p_01) / 2.0)).real)
        err += float(np.trace(block @ err_op).real)
        stats.append(SectorStats(n=n, t_n=t_n, p_det_n=p_det_n, p1_n=p1_n, q_n=q_n, p01_n=p01_n))
        p_det += p_det_n
        p_1 += p1_n
        q += q_n
        p_01 += p01_n
    q_z = err / p_det if p_det > 0.0 else 0.0
    obs = Observables(eta=eta, p_det=p_det, p_1=p_1, q=q, p_01=p_01, q_z=q_z)
    return obs, stats


@dataclass(frozen=True)
class SweepRow:
    """One grid point of the efficiency sweep."""

    eta: float
    k_main: float
    k_tight: float
    k_simple: float
    k_nomismatch: float
    ratio: float
    status: str
    argmin_pdet2: float


def _single_photon_deltas(eta: float, qber: float) -> DeltaPair:
    # closed-form single-photon observables of the depolarizing model:
    # pdet1 = (1+eta)/2, p1 = eta/2, t1 = 1, q1 = Q (loss cancels in the ratios)
    return deltas_from_single_obs((1.0 + eta) / 2.0, eta / 2.0, 1.0, qber, eta)


def sweep_figure(qber: float, p01: float, eta_grid) -> list[SweepRow]:
    """Key-rate curves of the depolarizing model over an efficiency grid.

    Per grid point: the multiphoton bound, the tight and simplified
    single-photon references (their biases derived from the same
    depolarized observables), the equal-efficiency reference at the
    averaged efficiency ``(1 + eta)/2``, and the ratio of the first to
    the last (zero when the reference vanishes).  Rows are ordered by
    ascending efficiency; aborted points carry NaN rates and the abort
    status.
    """
    rows: list[SweepRow] = []
    for eta in sorted(float(e) for e in eta_grid):
        model = DepolarizingModel(qber=qber, eta=eta, p01_override=p01)
        obs = depolarized_observables(model)
        result: KeyRateResult = keyrate_multiphoton(obs)
        deltas = _single_photon_deltas(eta, qber)
        p_det = (1.0 + eta) / 2.0
        k_tight = keyrate_single_tight(p_det, deltas)
        k_simple = keyrate_single_simple(p_det, deltas.delta_x)
        k_nomis = keyrate_no_mismatch(p_det, qber)
        if result.status == "feasible":
            k_main = result.k_bound
            ratio = k_main / k_nomis if k_nomis > 0.0 else 0.0
        else:
            k_main = float("nan")
            ratio = float("nan")
        rows.append(
            SweepRow(
                eta=eta,
                k_main=k_main,
                k_tight=k_tight,
                k_simple=k_simple,
                k_nomismatch=k_nomis,
                ratio=ratio,
                status=result.status,
                argmin_pdet2=result.argmin_pdet2,
            )
        )
    return rows
