import math

import numpy as np
import pytest

from etakey.fock import (
    JointState,
    PovmSet,
    SectorState,
    attenuation_operator,
    basis_change,
    build_povm,
    conditional_entropy_xb,
    decohere_photon_number,
    sector_offsets,
    von_neumann_entropy,
)
from etakey.oracles import sample_density
from etakey.scalarmath import theta

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def test_basis_change_one_photon_is_hadamard():
    assert np.allclose(basis_change(1), HADAMARD, atol=1e-15)


def test_basis_change_two_photon_bell_state():
    # (|2,0> + |0,2>)/sqrt(2) has the same coordinates in both bases
    u = basis_change(2)
    vec = np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)
    assert np.allclose(u @ vec, vec, atol=1e-12)


def test_basis_change_unitary_and_self_inverse():
    for n in range(1, 7):
        u = basis_change(n)
        assert np.max(np.abs(u @ u.conj().T - np.eye(n + 1))) <= 1e-12
        assert np.max(np.abs(u @ u - np.eye(n + 1))) <= 1e-12


def test_povm_completeness():
    for n in range(1, 7):
        for eta in (0.3, 0.7, 1.0):
            for basis in ("z", "x"):
                total = sum(build_povm(n, eta, basis).elements())
                assert np.max(np.abs(total - np.eye(n + 1))) <= 1e-12


def test_povm_single_photon_detector1():
    pov = build_povm(1, 0.6, "z")
    assert np.allclose(pov.p_1, np.diag([0.0, 0.6]), atol=1e-15)
    assert np.allclose(pov.p_empty, np.diag([0.0, 0.4]), atol=1e-15)
    assert np.allclose(pov.p_0, np.diag([1.0, 0.0]), atol=1e-15)


def test_povm_perfect_limit():
    for n in range(1, 6):
        for basis in ("z", "x"):
            imperfect = build_povm(n, 1.0, basis)
            perfect = build_povm(n, 1.0, basis, perfect=True)
            for a, b in zip(imperfect.elements(), perfect.elements()):
                assert np.allclose(a, b, atol=1e-12)


def test_povm_outcome_partition_on_random_states():
    rng = np.random.default_rng(2)
    for n in range(1, 6):
        rho = sample_density(n + 1, rng)
        for basis in ("z", "x"):
            pov = build_povm(n, 0.55, basis)
            total = sum(float(np.trace(rho @ p).real) for p in pov.elements())
            assert total == pytest.approx(1.0, abs=1e-12)


def test_doubleclick_operator_sandwich():
    rng = np.random.default_rng(3)
    for n in range(1, 6):
        for _ in range(200):
            rho = sample_density(n + 1, rng)
            eta = rng.uniform(0.1, 1.0)
            for basis in ("z", "x"):
                raw = build_povm(n, eta, basis).p_01
                ideal = build_povm(n, eta, basis, perfect=True).p_01
                assert np.trace(rho @ (ideal - raw)).real >= -1e-12
                assert np.trace(rho @ (raw - eta * ideal)).real >= -1e-12


def test_attenuation_operator():
    assert np.allclose(attenuation_operator(1, 0.49), np.diag([1.0, 0.7]), atol=1e-15)
    assert np.allclose(attenuation_operator(4, 1.0), np.eye(5), atol=1e-15)
    for n in range(1, 6):
        eta = 0.37
        g = attenuation_operator(n, eta)
        proj = np.zeros((n + 1, n + 1))
        proj[n, n] = 1.0
        assert np.allclose(g @ g, np.eye(n + 1) - (1.0 - theta(eta, n)) * proj, atol=1e-15)


def test_decohere_photon_number():
    rng = np.random.default_rng(4)
    nmax = 3
    _, total = sector_offsets(nmax)
    dim = 2 * total
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    out = decohere_photon_number(rho, nmax)
    # trace preserved, idempotent
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(decohere_photon_number(out, nmax), out, atol=0.0)
    # off-block entries are exactly zero
    offs, _ = sector_offsets(nmax)
    tags = np.concatenate([np.full(n + 1, n) for n in range(nmax + 1)])
    tags = np.tile(tags, 2)
    for i in range(dim):
        for j in range(dim):
            if tags[i] != tags[j]:
                assert out[i, j] == 0.0
    # an already block-diagonal input passes through unchanged
    assert np.allclose(decohere_photon_number(out, nmax), out, atol=0.0)


def test_decohere_shape_check():
    with pytest.raises(ValueError):
        decohere_photon_number(np.eye(5), nmax=3)


def test_conditional_entropy_pure_product():
    plus = np.full((2, 2), 0.5)
    psi = np.array([0.6, 0.8j])
    rho = np.kron(plus, np.outer(psi, psi.conj()))
    assert conditional_entropy_xb(rho) == pytest.approx(0.0, abs=1e-12)


def test_conditional_entropy_uniform_register():
    rng = np.random.default_rng(5)
    sigma = sample_density(3, rng)
    rho = np.kron(np.eye(2) / 2.0, sigma)
    assert conditional_entropy_xb(rho) == pytest.approx(1.0, abs=1e-12)


def test_conditional_entropy_maximally_correlated():
    rho = np.zeros((4, 4))
    rho[0, 0] = rho[3, 3] = 0.5
    assert conditional_entropy_xb(rho) == pytest.approx(0.0, abs=1e-12)


def test_conditional_entropy_trace_check():
    with pytest.raises(ValueError):
        conditional_entropy_xb(np.eye(4))


def test_von_neumann_entropy():
    assert von_neumann_entropy(np.diag([0.5, 0.5])) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-12)


def test_sector_state_validation():
    good = SectorState(n=1, basis="z", matrix=np.diag([0.5, 0.5]))
    assert good.trace == pytest.approx(1.0)
    with pytest.raises(ValueError):
        SectorState(n=1, basis="z", matrix=np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        SectorState(n=1, basis="z", matrix=np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        SectorState(n=1, basis="y", matrix=np.eye(2) / 2)


def test_joint_state_validation():
    ok = JointState(blocks={1: np.eye(4) / 4.0})
    assert ok.total_trace == pytest.approx(1.0)
    with pytest.raises(ValueError):
        JointState(blocks={1: np.eye(4)})  # trace 4 > 1
    with pytest.raises(ValueError):
        JointState(blocks={1: -np.eye(4) / 4.0})  # negative


def test_povmset_is_labeled():
    pov = build_povm(2, 0.5, "x")
    assert isinstance(pov, PovmSet)
    assert pov.basis == "x" and pov.n == 2
