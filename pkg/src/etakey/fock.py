"""Linear algebra on fixed photon-number sectors of a two-mode receiver.

An n-photon pulse entering the two-detector measurement lives in the
(n+1)-dimensional occupation space spanned by ``|n0, n1>``, where ``n0``
photons sit in the mode routed to detector 0 and ``n1`` in the mode
routed to detector 1.  Everything here is expressed per sector; the
infinite-dimensional receiver space only ever appears as a direct sum of
truncated sectors.

Conventions
-----------
* Sector basis index ``i`` counts photons in the detector-1 mode, so
  basis vector ``i`` is ``|n-i, i>``.  For one photon this orders the
  basis as the usual qubit pair (detector-0 photon, detector-1 photon),
  and the z-to-x basis change reduces to the Hadamard matrix.
* Detector 0 is perfect.  Detector 1 misses an m-photon packet with
  probability ``(1-eta)^m``.
* Joint states carry a two-dimensional sender register as the first
  tensor factor (row-major, sender index slowest).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial, sqrt

import numpy as np

from .scalarmath import theta, validate_eta

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-10


def basis_change(n: int) -> np.ndarray:
    """Unitary carrying x-basis occupation coordinates to z-basis ones.

    Entry ``(i, k)`` is the overlap of ``|n-i, i>_z`` with ``|n-k, k>_x``,
    obtained by expanding the x-mode creation operators
    ``(a +/- b)/sqrt(2)`` binomially and matching occupation monomials.
    The matrix is real orthogonal and self-inverse; for ``n = 1`` it is
    the Hadamard matrix.
    """
    if n < 1:
        raise ValueError(f"n = {n} must be >= 1")
    u = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        norm = 2.0 ** (n / 2.0) * sqrt(factorial(n - k) * factorial(k))
        for i in range(n + 1):
            p = n - i  # power of the detector-0 creation operator
            coeff = 0
            for s in range(max(0, p - (n - k)), min(k, p) + 1):
                coeff += comb(n - k, p - s) * comb(k, s) * (-1) ** (k - s)
            u[i, k] = coeff * sqrt(factorial(n - i) * factorial(i)) / norm
    return u


@dataclass(frozen=True)
class PovmSet:
    """The four threshold-detector outcome operators on one sector.

    Operators are (n+1)x(n+1) and ordered: no click, single click of
    detector 0, single click of detector 1, double click.  They are PSD
    and sum to the identity.
    """

    n: int
    basis: str
    p_empty: np.ndarray
    p_0: np.ndarray
    p_1: np.ndarray
    p_01: np.ndarray

    def elements(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.p_empty, self.p_0, self.p_1, self.p_01)


def build_povm(n: int, eta: float, basis: str = "z", perfect: bool = False) -> PovmSet:
    """Threshold-detector POVM on the n-photon sector.

    In the measurement basis's own occupation basis the four elements are
    diagonal: with ``i`` photons at detector 1 and ``n - i`` at detector
    0, a no-click requires every photon at detector 1 and all missed
    (weight ``(1-eta)^n`` at ``i = n``), a lone detector-0 click happens
    whenever ``i < n`` and detector 1 stays silent (weight
    ``(1-eta)^i``), and so on.  For ``basis='x'`` the diagonal
    construction is conjugated by :func:`basis_change`, so there is a
    single source of truth for the basis-change coefficients.
    ``perfect=True`` is the ``eta -> 1`` specialization.
    """
    if n < 1:
        raise ValueError(f"n = {n} must be >= 1")
    if basis not in ("z", "x"):
        raise ValueError(f"basis = {basis!r} must be 'z' or 'x'")
    eta = validate_eta(eta)
    i = np.arange(n + 1)
    if perfect:
        empty = np.zeros(n + 1)
        d0 = np.where(i == 0, 1.0, 0.0)
        d1 = np.where(i == n, 1.0, 0.0)
        dc = np.where((i >= 1) & (i <= n - 1), 1.0, 0.0)
    else:
        miss = (1.0 - eta) ** i.astype(float)
        empty = np.where(i == n, (1.0 - eta) ** n, 0.0)
        d0 = np.where(i <= n - 1, miss, 0.0)
        d1 = np.where(i == n, theta(eta, n), 0.0)
        dc = np.where((i >= 1) & (i <= n - 1), 1.0 - miss, 0.0)
    mats = [np.diag(v) for v in (empty, d0, d1, dc)]
    if basis == "x":
        u = basis_change(n)
        mats = [u @ m @ u.T for m in mats]
    return PovmSet(n=n, basis=basis, p_empty=mats[0], p_0=mats[1], p_1=mats[2], p_01=mats[3])


def attenuation_operator(n: int, eta: float) -> np.ndarray:
    """Square-root post-selection operator for a z-basis detection.

    Diagonal in the z occupation basis: the identity except at
    ``|0, n>`` (all photons at the lossy detector), where the entry is
    ``sqrt(theta_n)``.  Equivalently ``I - (1 - sqrt(theta_n)) |0,n><0,n|``.
    """
    if n < 1:
        raise ValueError(f"n = {n} must be >= 1")
    eta = validate_eta(eta)
    d = np.ones(n + 1)
    d[n] = sqrt(theta(eta, n))
    return np.diag(d)


def sector_offsets(nmax: int) -> tuple[np.ndarray, int]:
    """Start offset of each sector in the truncated direct sum, plus total dim."""
    dims = np.arange(nmax + 2)  # sector n has dim n+1
    offs = np.concatenate(([0], np.cumsum(dims[1:])))
    return offs[:-1], int(offs[-1])


def decohere_photon_number(matrix: np.ndarray, nmax: int, sender_dim: int = 2) -> np.ndarray:
    """Kill all coherences between different total photon numbers.

    ``matrix`` acts on sender ⊗ (sector 0 ⊕ ... ⊕ sector nmax), sender
    factor first.  The map is the pinching by the photon-number
    projectors: it zeroes every block coupling two different sectors,
    preserves the trace, and is idempotent.
    """
    _, total = sector_offsets(nmax)
    dim = sender_dim * total
    if matrix.shape != (dim, dim):
        raise ValueError(f"matrix shape {matrix.shape} does not match sender_dim={sender_dim}, nmax={nmax}")
    tags = np.concatenate([np.full(n + 1, n) for n in range(nmax + 1)])
    tags = np.tile(tags, sender_dim)
    mask = tags[:, None] == tags[None, :]
    return np.where(mask, matrix, 0.0)


def von_neumann_entropy(rho: np.ndarray, clip: float = 1e-14) -> float:
    """Base-2 von Neumann entropy via the eigenvalue spectrum.

    Eigenvalues below ``clip`` are treated as exact zeros; PSD inputs
    always carry rounding noise at that scale.
    """
    w = np.linalg.eigvalsh(rho)
    w = w[w > clip]
    return float(-np.sum(w * np.log2(w)))


def conditional_entropy_xb(rho_xb: np.ndarray) -> float:
    """Conditional entropy H(X|B) of a two-valued classical register X.

    ``rho_xb`` is a normalized density matrix on X ⊗ B with the
    classical register first.  Returns S(XB) - S(B) in bits.
    """
    d2 = rho_xb.shape[0]
    if d2 % 2 != 0:
        raise ValueError(f"dimension {d2} is not 2 * dim(B)")
    tr = float(np.trace(rho_xb).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace = {tr!r} deviates from 1 beyond {TRACE_TOL}")
    d = d2 // 2
    rho_b = rho_xb[:d, :d] + rho_xb[d:, d:]
    return von_neumann_entropy(rho_xb) - von_neumann_entropy(rho_b)


def _check_block(matrix: np.ndarray, dim: int, what: str) -> None:
    if matrix.shape != (dim, dim):
        raise ValueError(f"{what} has shape {matrix.shape}, expected {(dim, dim)}")
    if np.max(np.abs(matrix - matrix.conj().T)) > HERMITICITY_TOL:
        raise ValueError(f"{what} is not Hermitian within {HERMITICITY_TOL}")
    w = np.linalg.eigvalsh(matrix)
    if w[0] < -PSD_TOL:
        raise ValueError(f"{what} has eigenvalue {w[0]} < -{PSD_TOL}")


@dataclass(frozen=True)
class SectorState:
    """A (possibly subnormalized) state of one photon-number sector."""

    n: int
    basis: str
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.basis not in ("z", "x"):
            raise ValueError(f"basis = {self.basis!r} must be 'z' or 'x'")
        _check_block(self.matrix, self.n + 1, f"sector-{self.n} state")
        tr = float(np.trace(self.matrix).real)
        if not (-TRACE_TOL <= tr <= 1.0 + TRACE_TOL):
            raise ValueError(f"sector-{self.n} trace = {tr!r} outside [0, 1]")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class JointState:
    """Sender ⊗ receiver state, block-diagonal in total photon number.

    ``blocks[n]`` is the 2(n+1) x 2(n+1) Hermitian PSD block of the
    n-photon sector, sender factor first.  The block weights need not
    sum to one, but the total trace may not exceed it.
    """

    blocks: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        total = 0.0
        for n, block in self.blocks.items():
            if n < 0:
                raise ValueError(f"photon number {n} must be >= 0")
            _check_block(block, 2 * (n + 1), f"{n}-photon joint block")
            total += float(np.trace(block).real)
        if total > 1.0 + TRACE_TOL:
            raise ValueError(f"total trace = {total!r} exceeds 1")

    @property
    def total_trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks.values()))
