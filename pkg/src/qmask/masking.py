"""Masker models, the exact-masking checker and probabilistic-masking residuals.

A unitary masker sends ``|a> (x) |b>`` to ``U (|a> (x) |b>)``.  A
probabilistic masker is stored as a linear map from the A-system alone
(the fixed ancilla already absorbed) into ``A (x) B``; an input ``|a>`` is
mapped to ``p |psi>`` with ``p = ||L a||``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateSuperpositionError, DimensionError, MaskerError
from .linalg import as_matrix, is_unitary, psd_sqrt, trace_norm
from .states import (
    BipartitePureState,
    as_ket,
    basis,
    partial_trace_a,
    partial_trace_b,
    superpose,
)

__all__ = [
    "UnitaryMasker",
    "ProbabilisticMasker",
    "Masker",
    "MaskResidualReport",
    "PurificationCheck",
    "DEFAULT_WITNESS_PAIRS",
    "apply_unitary_masker",
    "apply_probabilistic_masker",
    "masked_state",
    "marginal_spread",
    "check_exact_masking",
    "cnot_phase_masker",
    "phase_state",
    "probabilistic_masking_residual",
    "simultaneous_purification_check",
]

_INJECTIVE_TOL = 1e-10
_IMAGE_TOL = 1e-12

# (u, v) with u1 conj(v1) conj(u2) v2 = i/4, which is not real
DEFAULT_WITNESS_PAIRS: tuple[tuple[complex, complex], ...] = (
    (1 / np.sqrt(2), 1 / np.sqrt(2)),
    (1j / np.sqrt(2), 1 / np.sqrt(2)),
)


@dataclass(frozen=True)
class UnitaryMasker:
    """Unitary masker: `unitary` acts on A(x)B, `ancilla` is the fixed B ket."""

    unitary: np.ndarray
    ancilla: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        u = as_matrix(self.unitary, square=True)
        n = self.dim_a * self.dim_b
        if u.shape != (n, n):
            raise DimensionError(f"unitary shape {u.shape} does not match dims ({self.dim_a}, {self.dim_b})")
        if not is_unitary(u, 1e-10):
            raise MaskerError("masker matrix is not unitary within 1e-10")
        b = as_ket(self.ancilla, self.dim_b)
        u = u.copy()
        b = b.copy()
        u.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "ancilla", b)

    @classmethod
    def from_unitary(cls, unitary, dim_a: int, dim_b: int, ancilla=None) -> "UnitaryMasker":
        if ancilla is None:
            ancilla = basis(dim_b, 0)
        return cls(unitary, ancilla, dim_a, dim_b)

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_a, self.dim_b

    @property
    def isometry(self) -> np.ndarray:
        """The ``(r s) x r`` matrix ``U (I (x) |b>)``."""
        return self.unitary @ np.kron(np.eye(self.dim_a), self.ancilla.reshape(-1, 1))


@dataclass(frozen=True)
class ProbabilisticMasker:
    """Injective, trace-decreasing linear masker ``L : C^r -> C^r (x) C^s``."""

    linear_map: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        lmap = as_matrix(self.linear_map)
        if lmap.shape != (self.dim_a * self.dim_b, self.dim_a):
            raise DimensionError(
                f"linear map shape {lmap.shape} does not match dims ({self.dim_a}, {self.dim_b})"
            )
        sv = np.linalg.svd(lmap, compute_uv=False)
        if sv[-1] <= _INJECTIVE_TOL:
            raise MaskerError(f"linear map is not injective (smallest singular value {sv[-1]:.3e})")
        if sv[0] > 1 + _INJECTIVE_TOL:
            raise MaskerError(f"linear map is not trace decreasing (largest singular value {sv[0]:.12g})")
        lmap = lmap.copy()
        lmap.flags.writeable = False
        object.__setattr__(self, "linear_map", lmap)

    @classmethod
    def from_unitary_masker(cls, masker: UnitaryMasker, scale: float = 1.0) -> "ProbabilisticMasker":
        return cls(scale * masker.isometry, masker.dim_a, masker.dim_b)

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_a, self.dim_b

    @property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.linear_map, compute_uv=False)


Masker = Union[UnitaryMasker, ProbabilisticMasker]


def apply_unitary_masker(m: UnitaryMasker, state) -> BipartitePureState:
    a = as_ket(state, m.dim_a)
    out = m.unitary @ np.kron(a, m.ancilla)
    return BipartitePureState(out, m.dim_a, m.dim_b)


def apply_probabilistic_masker(m: ProbabilisticMasker, state) -> tuple[float, BipartitePureState]:
    """Return the success amplitude ``p = ||L a||`` and the normalized image."""
    a = as_ket(state, m.dim_a)
    raw = m.linear_map @ a
    p = float(np.linalg.norm(raw))
    if p <= _IMAGE_TOL:
        raise MaskerError("image of a unit vector vanished: the linear map is not injective")
    return p, BipartitePureState(raw / p, m.dim_a, m.dim_b)


def masked_state(masker: Masker, state) -> BipartitePureState:
    """Normalized output of either kind of masker."""
    if isinstance(masker, UnitaryMasker):
        return apply_unitary_masker(masker, state)
    if isinstance(masker, ProbabilisticMasker):
        return apply_probabilistic_masker(masker, state)[1]
    raise TypeError(f"not a masker: {type(masker).__name__}")


@dataclass(frozen=True)
class MaskResidualReport:
    max_marginal_deviation_a: float
    max_marginal_deviation_b: float
    pairwise_min_fidelity_a: float
    pairwise_min_fidelity_b: float
    reference_marginals: tuple[np.ndarray, np.ndarray]
    tol: float = 1e-10

    @property
    def exact(self) -> bool:
        return max(self.max_marginal_deviation_a, self.max_marginal_deviation_b) <= self.tol


def _side_spread(marginals: Sequence[np.ndarray], with_fidelity: bool) -> tuple[float, float]:
    roots = [psd_sqrt(rho) for rho in marginals] if with_fidelity else None
    dev, fid = 0.0, 1.0
    for i, j in itertools.combinations(range(len(marginals)), 2):
        dev = max(dev, trace_norm(marginals[i] - marginals[j]))
        if with_fidelity:
            fid = min(fid, trace_norm(roots[i] @ roots[j]))
    return dev, fid


def marginal_spread(states: Sequence[BipartitePureState], with_fidelity: bool = True) -> tuple[float, float, float, float]:
    """Pairwise spread of marginals over a set of bipartite states.

    Returns ``(dev_a, dev_b, fid_a, fid_b)``: the largest trace-norm
    distance and the smallest fidelity between A-marginals, then the same
    for B-marginals.  Fidelities are reported as 1 when not computed.
    """
    marg_a = [partial_trace_b(s) for s in states]
    marg_b = [partial_trace_a(s) for s in states]
    dev_a, fid_a = _side_spread(marg_a, with_fidelity)
    dev_b, fid_b = _side_spread(marg_b, with_fidelity)
    return dev_a, dev_b, fid_a, fid_b


def check_exact_masking(masker: Masker, inputs: Sequence, tol: float = 1e-10) -> MaskResidualReport:
    """Mask every input and compare all marginals pairwise, side by side."""
    if len(inputs) < 2:
        raise ValueError("need at least two input states")
    outs = [masked_state(masker, a) for a in inputs]
    dev_a, dev_b, fid_a, fid_b = marginal_spread(outs)
    ref = (partial_trace_b(outs[0]), partial_trace_a(outs[0]))
    return MaskResidualReport(dev_a, dev_b, fid_a, fid_b, ref, tol)


def cnot_phase_masker(d: int) -> UnitaryMasker:
    """Generalized CNOT ``|j>|k> -> |j>|k + j mod d>`` with ancilla ``|0>``.

    Masks every equal-amplitude phase state ``d^{-1/2} sum_j e^{i phi_j}|j>``:
    both marginals of the output are ``I/d``.
    """
    if d < 2:
        raise DimensionError("phase masker needs d >= 2")
    u = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            u[j * d + (k + j) % d, j * d + k] = 1.0
    return UnitaryMasker(u, basis(d, 0), d, d)


def phase_state(phases) -> np.ndarray:
    """Equal-amplitude ket with the given relative phases."""
    phases = np.asarray(phases, dtype=float)
    return np.exp(1j * phases) / np.sqrt(phases.size)


def probabilistic_masking_residual(
    psi1: BipartitePureState,
    psi2: BipartitePureState,
    p1: float,
    p2: float,
    u: complex,
    v: complex,
) -> float:
    """How far the superposed image fails to share marginals with psi1, psi2.

    The input ``u|1> + v|2>`` of a probabilistic masker with images
    ``p1 psi1`` and ``p2 psi2`` lands on ``u p1 psi1 + v p2 psi2``.  After
    normalizing that vector to ``phi``, the result is the largest trace-norm
    distance between marginals of any two of ``{phi, psi1, psi2}``, over both
    subsystems.
    """
    try:
        phi = superpose(psi1, psi2, u * p1, v * p2)
    except DegenerateSuperpositionError as exc:
        raise DegenerateSuperpositionError(f"superposed image vanished for (u, v) = ({u}, {v})") from exc
    dev_a, dev_b, _, _ = marginal_spread([phi, psi1, psi2], with_fidelity=False)
    return max(dev_a, dev_b)


@dataclass(frozen=True)
class PurificationCheck:
    is_consistent: bool
    forced_phase_collinear: bool
    max_deviation: float


def simultaneous_purification_check(
    psi1: BipartitePureState,
    psi2: BipartitePureState,
    witness_pairs: Sequence[tuple[complex, complex]] = DEFAULT_WITNESS_PAIRS,
    tol: float = 1e-10,
    *,
    p1: float = 1.0,
    p2: float = 1.0,
    collinear_tol: float | None = None,
) -> PurificationCheck:
    """Can psi1, psi2 and their superposed images all purify the same marginals?

    ``is_consistent`` holds when every residual is within `tol`;
    ``forced_phase_collinear`` when ``|<psi1|psi2>| >= 1 - collinear_tol``
    (`collinear_tol` defaults to `tol`).  For witness pairs whose product
    ``u1 conj(v1) conj(u2) v2`` is not real, consistency forces collinearity.
    """
    collinear_tol = tol if collinear_tol is None else collinear_tol
    worst = max(probabilistic_masking_residual(psi1, psi2, p1, p2, u, v) for u, v in witness_pairs)
    collinear = abs(psi1.inner(psi2)) >= 1.0 - collinear_tol
    return PurificationCheck(worst <= tol, bool(collinear), worst)
