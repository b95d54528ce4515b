import math

import numpy as np
import pytest

from etakey.fock import JointState, basis_change, build_povm
from etakey.keyrate import STATUS_FEASIBLE
from etakey.oracles import sample_density
from etakey.scalarmath import theta
from etakey.simulate import (
    DepolarizingModel,
    depolarized_observables,
    depolarized_state,
    observables_from_state,
    sweep_figure,
)


def test_depolarized_observables_closed_forms():
    obs = depolarized_observables(DepolarizingModel(qber=0.05, eta=0.8))
    assert obs.p_det == pytest.approx(0.9, abs=1e-15)
    assert obs.p_1 == pytest.approx(0.4, abs=1e-15)
    assert obs.q == pytest.approx(0.05, abs=1e-15)
    assert obs.q_z == pytest.approx(0.05, abs=1e-15)
    assert obs.p_01 == pytest.approx(1e-5, abs=1e-20)


def test_depolarized_observables_perfect_detectors():
    obs = depolarized_observables(DepolarizingModel(qber=0.13, eta=1.0))
    assert obs.p_det == pytest.approx(1.0, abs=1e-15)
    assert obs.p_1 == pytest.approx(0.5, abs=1e-15)


def test_depolarized_observables_loss_scaling():
    full = depolarized_observables(DepolarizingModel(qber=0.05, eta=0.7))
    half = depolarized_observables(DepolarizingModel(qber=0.05, eta=0.7, loss=0.5))
    assert half.p_det == pytest.approx(full.p_det / 2, abs=1e-15)
    assert half.q == pytest.approx(full.q / 2, abs=1e-15)
    assert half.q_z == pytest.approx(full.q_z, abs=1e-15)  # a ratio, loss-free


def test_observables_from_state_matches_closed_forms():
    # the exact POVM traces on the single-photon state must reproduce
    # the closed forms (the state itself carries no double clicks)
    for qber, eta in ((0.05, 0.8), (0.09, 0.5), (0.0, 1.0), (0.12, 0.33)):
        model = DepolarizingModel(qber=qber, eta=eta)
        expected = depolarized_observables(model)
        obs, stats = observables_from_state(depolarized_state(model), eta)
        assert obs.p_det == pytest.approx(expected.p_det, abs=1e-10)
        assert obs.p_1 == pytest.approx(expected.p_1, abs=1e-10)
        assert obs.q == pytest.approx(expected.q, abs=1e-10)
        assert obs.q_z == pytest.approx(expected.q_z, abs=1e-10)
        assert obs.p_01 == pytest.approx(0.0, abs=1e-15)
        assert len(stats) == 1 and stats[0].n == 1
        assert stats[0].t_n == pytest.approx(1.0, abs=1e-12)


def test_two_photon_bell_block_makes_no_double_clicks():
    phi = np.zeros(3)
    phi[0] = phi[2] = 1.0 / math.sqrt(2.0)
    block = np.kron(np.eye(2) / 2.0, np.outer(phi, phi))
    obs, stats = observables_from_state(JointState(blocks={2: block}), 0.6)
    assert obs.p_01 == pytest.approx(0.0, abs=1e-14)
    for basis in ("z", "x"):
        p01 = build_povm(2, 0.6, basis).p_01
        assert np.trace(np.outer(phi, phi) @ p01).real == pytest.approx(0.0, abs=1e-14)


def test_three_photon_z_aligned_doubleclick():
    # |3,0> in the z basis: no z double clicks, 3/4 in the x basis,
    # mean 0.375 under perfect detection
    vec = np.zeros(4)
    vec[0] = 1.0
    rho = np.outer(vec, vec)
    pz = build_povm(3, 1.0, "z", perfect=True).p_01
    px = build_povm(3, 1.0, "x", perfect=True).p_01
    assert np.trace(rho @ pz).real == pytest.approx(0.0, abs=1e-14)
    assert np.trace(rho @ px).real == pytest.approx(0.75, abs=1e-12)
    # and the stated amplitudes in the x basis: (sqrt6, 3sqrt2, 3sqrt2, sqrt6)/sqrt48
    amps = basis_change(3).T @ vec  # x coordinates of the z-basis vector
    expected = np.array([math.sqrt(6), 3 * math.sqrt(2), 3 * math.sqrt(2), math.sqrt(6)])
    expected /= math.sqrt(48)
    assert np.allclose(np.abs(amps), expected, atol=1e-12)


def test_sector_stats_loss_accounting():
    # t_n = p_{0 or dc}^(n) + p_1^(n)/theta_n on every sector
    rng = np.random.default_rng(21)
    for n in range(1, 6):
        for eta in (0.4, 0.9):
            block = np.kron(np.diag([0.5, 0.5]), sample_density(n + 1, rng))
            obs, stats = observables_from_state(JointState(blocks={n: block}), eta)
            s = stats[0]
            p_0_or_dc = s.p_det_n - s.p1_n
            assert s.t_n == pytest.approx(p_0_or_dc + s.p1_n / theta(eta, n), abs=1e-10)
            assert s.p1_n <= s.p_det_n + 1e-12 <= s.t_n + 1e-11


def test_click_completeness_per_sector():
    rng = np.random.default_rng(22)
    for n in range(1, 6):
        rho = sample_density(n + 1, rng)
        pov = build_povm(n, 0.7, "z")
        parts = sum(float(np.trace(rho @ p).real) for p in pov.elements())
        assert parts == pytest.approx(1.0, abs=1e-12)


def test_imperfect_never_beats_perfect_detection():
    rng = np.random.default_rng(23)
    for n in range(1, 6):
        block = np.kron(np.diag([0.5, 0.5]), sample_density(n + 1, rng))
        state = JointState(blocks={n: block})
        p_imp, _ = observables_from_state(state, 0.5)
        p_per, _ = observables_from_state(state, 1.0)
        assert p_imp.p_det <= p_per.p_det + 1e-12


def test_observables_from_state_rejects_bad_block():
    with pytest.raises(ValueError):
        JointState(blocks={1: np.diag([0.5, 0.5, -0.5, 0.5])})


def test_sweep_rows_and_orderings():
    rows = sweep_figure(0.05, 1e-5, np.linspace(0.5, 1.0, 11))
    assert [r.eta for r in rows] == sorted(r.eta for r in rows)
    for a, b in zip(rows, rows[1:]):
        assert a.k_main <= b.k_main + 1e-12  # nonincreasing as eta decreases
    for r in rows:
        assert r.status == STATUS_FEASIBLE
        assert r.k_main <= r.k_tight + 1e-9
        assert r.ratio == pytest.approx(r.k_main / r.k_nomismatch, abs=1e-12)


def test_sweep_perfect_detector_row():
    (row,) = sweep_figure(0.05, 1e-5, [1.0])
    assert row.k_main == pytest.approx(row.k_nomismatch, abs=2e-3)


def test_sweep_upper_bound_ordering_no_errors():
    rows = sweep_figure(0.0, 0.0, np.linspace(0.4, 1.0, 7))
    for r in rows:
        assert r.k_main <= r.k_tight + 1e-9


def test_sweep_mismatch_ratio_claim():
    (row,) = sweep_figure(0.09, 1e-5, [0.8])
    assert row.ratio > 0.9


def test_depolarizing_model_validation():
    with pytest.raises(ValueError):
        DepolarizingModel(qber=0.6, eta=0.9)
    with pytest.raises(ValueError):
        DepolarizingModel(qber=0.05, eta=0.0)
