"""Kets, bipartite pure states and their marginals.

Basis convention: the amplitude of ``|j>_A |k>_B`` lives at flat index
``j * dim_b + k``, so reshaping the amplitude vector row-major gives the
coefficient matrix ``M`` with rows indexed by A and columns by B.  With this
convention ``Tr_B |psi><psi| = M M^dag`` and ``Tr_A |psi><psi| = (M^dag M)^T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSuperpositionError, DimensionError, NormalizationError
from .linalg import check_density_matrix, hermitian_eigen

__all__ = [
    "NORM_TOL",
    "RANK_TOL",
    "as_ket",
    "basis",
    "random_ket",
    "BipartitePureState",
    "PurificationSpec",
    "random_bipartite_state",
    "partial_trace_a",
    "partial_trace_b",
    "partial_trace_dense",
    "purify",
    "superpose",
]

NORM_TOL = 1e-10
RANK_TOL = 1e-12
_DEGENERATE_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def as_ket(vec, dim: int | None = None, tol: float = NORM_TOL) -> np.ndarray:
    """Validate a normalized state vector and return it as a 1-D complex array."""
    v = np.asarray(vec, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"a ket must be a non-empty 1-D array, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"ket has dimension {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise DimensionError("ket has non-finite amplitudes")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"ket norm is {norm:.15g}")
    return v


def basis(dim: int, index: int) -> np.ndarray:
    """Computational basis ket ``|index>`` (zero-based) in dimension `dim`."""
    if not 0 <= index < dim:
        raise DimensionError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state in dimension `dim`."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class BipartitePureState:
    """Normalized pure state on ``C^dim_a (x) C^dim_b``.

    Construction rejects vectors whose norm is off by more than 1e-10; use
    :meth:`from_matrix` to build a state from its coefficient matrix.
    """

    amplitudes: np.ndarray
    dim_a: int
    dim_b: int
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.dim_a < 1 or self.dim_b < 1:
            raise DimensionError("subsystem dimensions must be positive")
        if amps.size != self.dim_a * self.dim_b:
            raise DimensionError(
                f"{amps.size} amplitudes do not fit dims ({self.dim_a}, {self.dim_b})"
            )
        as_ket(amps)
        amps = _frozen(amps)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "_matrix", amps.reshape(self.dim_a, self.dim_b))

    @classmethod
    def from_matrix(cls, m) -> "BipartitePureState":
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2:
            raise DimensionError("coefficient matrix must be 2-D")
        return cls(m.reshape(-1), m.shape[0], m.shape[1])

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_a, self.dim_b

    @property
    def matrix(self) -> np.ndarray:
        """Coefficient matrix ``M`` with ``M[j, k]`` the amplitude of ``|j>|k>``."""
        return self._matrix

    def inner(self, other: "BipartitePureState") -> complex:
        """``<self|other>``."""
        _check_same_dims(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def with_phase(self, theta: float) -> "BipartitePureState":
        return BipartitePureState(np.exp(1j * theta) * self.amplitudes, self.dim_a, self.dim_b)


def _check_same_dims(a: BipartitePureState, b: BipartitePureState) -> None:
    if a.dims != b.dims:
        raise DimensionError(f"dimension mismatch {a.dims} vs {b.dims}")


def random_bipartite_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> BipartitePureState:
    return BipartitePureState(random_ket(dim_a * dim_b, rng), dim_a, dim_b)


def partial_trace_a(psi: BipartitePureState) -> np.ndarray:
    """Marginal on B, ``Tr_A |psi><psi|`` (``dim_b x dim_b``).

    Equal to ``(M^dag M)^T``; the transpose does not change spectra or any
    trace-norm distance between such marginals.
    """
    m = psi.matrix
    return m.T @ m.conj()


def partial_trace_b(psi: BipartitePureState) -> np.ndarray:
    """Marginal on A, ``Tr_B |psi><psi| = M M^dag`` (``dim_a x dim_a``)."""
    m = psi.matrix
    return m @ m.conj().T


def partial_trace_dense(rho_ab, dims: tuple[int, int], side: str) -> np.ndarray:
    """Trace out subsystem `side` ("A" or "B") of a density matrix on A(x)B."""
    r, s = dims
    rho = np.asarray(rho_ab, dtype=complex)
    if rho.shape != (r * s, r * s):
        raise DimensionError(f"density matrix shape {rho.shape} does not match dims {dims}")
    t = rho.reshape(r, s, r, s)
    side = side.upper()
    if side == "A":
        return np.einsum("jkjl->kl", t)
    if side == "B":
        return np.einsum("jkik->ji", t)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of every column made real positive
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)


@dataclass(frozen=True)
class PurificationSpec:
    """Data of a purification ``sum_j sqrt(lambda_j) |e_j> |mu_j>``.

    `system_basis` and `ancilla_basis` hold the kets as columns.
    """

    spectrum: np.ndarray
    system_basis: np.ndarray
    ancilla_basis: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.spectrum, dtype=float).reshape(-1)
        sys_b = np.asarray(self.system_basis, dtype=complex)
        anc_b = np.asarray(self.ancilla_basis, dtype=complex)
        n = lam.size
        if sys_b.ndim != 2 or anc_b.ndim != 2 or sys_b.shape[1] != n or anc_b.shape[1] != n:
            raise DimensionError("bases must be matrices with one column per eigenvalue")
        if np.any(lam < -NORM_TOL) or abs(lam.sum() - 1.0) > NORM_TOL:
            raise NormalizationError("spectrum must be a probability vector")
        for name, b in (("system", sys_b), ("ancilla", anc_b)):
            if np.linalg.norm(b.conj().T @ b - np.eye(n)) > NORM_TOL:
                raise NormalizationError(f"{name} basis is not orthonormal")
        object.__setattr__(self, "spectrum", np.clip(lam, 0.0, None))
        object.__setattr__(self, "system_basis", sys_b)
        object.__setattr__(self, "ancilla_basis", anc_b)

    def state(self) -> BipartitePureState:
        m = (self.system_basis * np.sqrt(self.spectrum)) @ self.ancilla_basis.T
        return BipartitePureState.from_matrix(m)

    def density_matrix(self) -> np.ndarray:
        return (self.system_basis * self.spectrum) @ self.system_basis.conj().T


def purify(rho, ancilla_dim: int) -> BipartitePureState:
    """Purification of `rho` with the system in the first tensor factor.

    Eigenvalues are taken in descending order and paired with ancilla kets
    ``|0>, |1>, ...``; eigenvectors carry a real positive largest entry.
    """
    rho = check_density_matrix(rho)
    w, v = hermitian_eigen(rho)
    order = np.arange(w.size)[::-1]
    w, v = np.clip(w[order], 0.0, None), _fix_phase(v[:, order])
    rank = int(np.sum(w > RANK_TOL))
    if ancilla_dim < rank:
        raise DimensionError(f"ancilla dimension {ancilla_dim} is below the rank {rank} of rho")
    w, v = w[:rank], v[:, :rank]
    w = w / w.sum()
    spec = PurificationSpec(w, v, np.eye(ancilla_dim, rank, dtype=complex))
    return spec.state()


def superpose(psi1: BipartitePureState, psi2: BipartitePureState, u: complex, v: complex) -> BipartitePureState:
    """Normalized ``u |psi1> + v |psi2>``; its coefficient matrix is ``(uM + vN)/norm``."""
    _check_same_dims(psi1, psi2)
    vec = u * psi1.amplitudes + v * psi2.amplitudes
    norm = np.linalg.norm(vec)
    if norm <= _DEGENERATE_TOL:
        raise DegenerateSuperpositionError(f"superposition has norm {norm:.3e}")
    return BipartitePureState(vec / norm, psi1.dim_a, psi1.dim_b)
