"""Lower bounds on approximate universal masking and their numerical witnesses.

Every candidate masker yields four trace-norm quantities from a pair of
orthogonal images ``|Psi>, |Phi>`` with coefficient matrices ``M, N``::

    ||M M^dag - N N^dag||_1            (A-marginals of the two images)
    ||M^dag M - N^dag N||_1            (B-marginals of the two images)
    ||Tr_B Omega_i - N N^dag||_1       (two superposed images, i = 1, 2)

With ``delta`` the largest of them the chain of triangle inequalities gives
``||M N^dag||_1 <= 3 delta`` and ``|Tr(M^dag M N^dag N)| >= 1/t - delta``,
hence ``9 delta^2 + delta - 1/t >= 0`` for every masker, ``t = min(r, s)``.
Writing ``delta = 2 sqrt(2) eps`` turns this into the bound on ``eps``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionError, MaskerError, NormalizationError
from .linalg import frobenius_norm, trace_norm
from .masking import (
    DEFAULT_WITNESS_PAIRS,
    Masker,
    ProbabilisticMasker,
    UnitaryMasker,
    apply_probabilistic_masker,
    apply_unitary_masker,
    marginal_spread,
    masked_state,
)
from .states import BipartitePureState, as_ket, basis, partial_trace_b

__all__ = [
    "SQRT2",
    "BoundResult",
    "WitnessReport",
    "WitnessPair",
    "Lemma1Solution",
    "StateSetEpsilon",
    "ClaimStep",
    "RankTraceBound",
    "trace_bound_linear",
    "trace_bound_fidelity",
    "epsilon_from_delta_linear",
    "epsilon_from_delta_fidelity",
    "theoretical_bound",
    "witness_from_images",
    "witness_delta_unitary",
    "probabilistic_witness_pair",
    "witness_delta_probabilistic",
    "epsilon_over_state_set",
    "lemma1_solve",
    "verify_claim_step",
    "rank_trace_bound_check",
]

SQRT2 = float(np.sqrt(2.0))
_ORTHO_TOL = 1e-10


def trace_bound_linear(eps: float) -> float:
    """Trace-norm radius ``2 sqrt(2) eps`` attached to fidelity ``1 - eps``
    by the linear conversion used in the proofs."""
    return 2.0 * SQRT2 * eps


def trace_bound_fidelity(eps: float) -> float:
    """Trace-norm radius ``2 sqrt(2 eps - eps^2)`` that ``F >= 1 - eps``
    implies through ``F <= sqrt(1 - ||P - Q||_1^2 / 4)``."""
    return 2.0 * np.sqrt(max(0.0, 2.0 * eps - eps * eps))


def epsilon_from_delta_linear(delta: float) -> float:
    return delta / (2.0 * SQRT2)


def epsilon_from_delta_fidelity(delta: float) -> float:
    """Inverse of :func:`trace_bound_fidelity` (``delta`` capped at 2)."""
    d = min(max(delta, 0.0), 2.0)
    # 1 - sqrt(1 - d^2/4), written to avoid cancellation for small d
    q = d * d / 4.0
    return q / (1.0 + np.sqrt(1.0 - q))


@dataclass(frozen=True)
class BoundResult:
    r: int
    s: int
    t: int
    delta_star: float
    epsilon_star: float
    max_fidelity: float
    epsilon_star_via_fidelity: float

    @property
    def delta_residual(self) -> float:
        return 9 * self.delta_star**2 + self.delta_star - 1 / self.t

    @property
    def epsilon_residual(self) -> float:
        e = self.epsilon_star
        return 72 * e * e + 2 * SQRT2 * e - 1 / self.t

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delta_residual"] = self.delta_residual
        d["epsilon_residual"] = self.epsilon_residual
        return d


def theoretical_bound(r: int, s: int) -> BoundResult:
    """Smallest ``delta`` and ``eps`` compatible with universal masking.

    ``delta_star`` is the positive root of ``9 d^2 + d - 1/t`` and
    ``epsilon_star = delta_star / (2 sqrt 2)`` the positive root of
    ``72 e^2 + 2 sqrt(2) e - 1/t``, i.e.
    ``eps* = sqrt(2)/72 * (sqrt(1 + 36/t) - 1)``.

    >>> round(theoretical_bound(2, 2).epsilon_star, 7)
    0.0659752
    """
    if r < 2 or s < 2:
        raise DimensionError(f"dimensions must be >= 2, got ({r}, {s})")
    t = min(r, s)
    x = 36.0 / t
    # (sqrt(1+x) - 1)/18 rationalized, stable for large t
    delta = x / (18.0 * (1.0 + np.sqrt(1.0 + x)))
    eps = epsilon_from_delta_linear(delta)
    return BoundResult(
        r=r,
        s=s,
        t=t,
        delta_star=float(delta),
        epsilon_star=float(eps),
        max_fidelity=float(1.0 - eps),
        epsilon_star_via_fidelity=float(epsilon_from_delta_fidelity(delta)),
    )


@dataclass(frozen=True)
class WitnessReport:
    t: int
    norm_a_side: float
    norm_b_side: float
    norm_omega_1: float
    norm_omega_2: float
    delta: float
    implied_epsilon: float
    implied_epsilon_via_fidelity: float
    quadratic_slack: float
    claim_lhs: float
    claim_rhs: float
    claim_rhs_frobenius: float
    cross_norm_mn: float
    cross_norm_nm: float
    overlap_trace: float

    def chain_violations(self, tol: float = 1e-9) -> list[str]:
        """Names of the intermediate inequalities that fail by more than `tol`."""
        d = self.delta
        checks = {
            "cross_mn<=3delta": self.cross_norm_mn <= 3 * d + tol,
            "cross_nm<=3delta": self.cross_norm_nm <= 3 * d + tol,
            "overlap<=cross_mn*cross_nm": self.overlap_trace <= self.cross_norm_mn * self.cross_norm_nm + tol,
            "claim_lhs<=frobenius": self.claim_lhs <= self.claim_rhs_frobenius + tol,
            "frobenius<=trace": self.claim_rhs_frobenius <= self.claim_rhs + tol,
            "claim_rhs<=delta": self.claim_rhs <= d + tol,
            "overlap>=1/t-claim": self.overlap_trace >= 1.0 / self.t - self.claim_lhs - tol,
            "quadratic": self.quadratic_slack >= -tol,
        }
        return [name for name, ok in checks.items() if not ok]

    def to_dict(self) -> dict:
        return asdict(self)


def witness_from_images(
    m: np.ndarray, n: np.ndarray, omegas: list[BipartitePureState], reference: np.ndarray
) -> WitnessReport:
    """Assemble a :class:`WitnessReport` from image coefficient matrices.

    `omegas` are the superposed images and `reference` the A-marginal they
    are compared against.
    """
    t = min(m.shape)
    mh, nh = m.conj().T, n.conj().T
    mdm, ndn = mh @ m, nh @ n
    norm_a = trace_norm(m @ mh - n @ nh)
    norm_b = trace_norm(mdm - ndn)
    om = [trace_norm(partial_trace_b(w) - reference) for w in omegas]
    delta = max(norm_a, norm_b, *om)
    lmat = ndn - mdm
    mn = m @ nh
    return WitnessReport(
        t=t,
        norm_a_side=norm_a,
        norm_b_side=norm_b,
        norm_omega_1=om[0],
        norm_omega_2=om[1],
        delta=delta,
        implied_epsilon=epsilon_from_delta_linear(delta),
        implied_epsilon_via_fidelity=float(epsilon_from_delta_fidelity(delta)),
        quadratic_slack=9 * delta * delta + delta - 1.0 / t,
        claim_lhs=float(abs(np.trace(mdm @ lmat))),
        claim_rhs=trace_norm(lmat),
        claim_rhs_frobenius=frobenius_norm(lmat),
        cross_norm_mn=trace_norm(mn),
        cross_norm_nm=trace_norm(mn.conj().T),
        overlap_trace=float(abs(np.trace(mn @ mn.conj().T))),
    )


def witness_delta_unitary(masker: UnitaryMasker, input_1=None, input_2=None) -> WitnessReport:
    """Replay the unitary-masker proof chain on one orthonormal input pair.

    Defaults to the computational kets ``|0>, |1>`` of system A.
    """
    a1 = as_ket(basis(masker.dim_a, 0) if input_1 is None else input_1, masker.dim_a)
    a2 = as_ket(basis(masker.dim_a, 1) if input_2 is None else input_2, masker.dim_a)
    if abs(np.vdot(a1, a2)) > _ORTHO_TOL:
        raise NormalizationError("witness inputs must be orthogonal")
    psi = apply_unitary_masker(masker, a1)
    phi = apply_unitary_masker(masker, a2)
    omegas = [apply_unitary_masker(masker, u * a1 + v * a2) for u, v in DEFAULT_WITNESS_PAIRS]
    ref = partial_trace_b(phi)
    return witness_from_images(psi.matrix, phi.matrix, omegas, ref)


@dataclass(frozen=True)
class WitnessPair:
    """Inputs ``a1, a2`` with ``L a_j = p_j psi_j`` and ``<psi1|psi2> = 0``.

    The phase of ``a2`` (and ``psi2``) is chosen so ``<a1|a2> = overlap_r >= 0``.
    """

    a1: np.ndarray
    a2: np.ndarray
    p1: float
    p2: float
    psi1: BipartitePureState
    psi2: BipartitePureState
    overlap_r: float


def probabilistic_witness_pair(m: ProbabilisticMasker) -> WitnessPair:
    """Orthonormalize the images of ``|0>, |1>`` and pull them back through L."""
    if m.dim_a < 2:
        raise MaskerError("image subspace has rank < 2")
    lmap = m.linear_map
    w1, w2 = lmap[:, 0], lmap[:, 1]
    n1 = np.linalg.norm(w1)
    e1 = w1 / n1
    c = np.vdot(e1, w2)
    w2p = w2 - c * e1
    n2 = np.linalg.norm(w2p)
    if n2 <= 1e-12 * max(1.0, np.linalg.norm(w2)):
        raise MaskerError("image subspace has rank < 2")
    # preimages of e1 and w2p/n2 as combinations of |0>, |1>
    b1 = np.zeros(m.dim_a, dtype=complex)
    b2 = np.zeros(m.dim_a, dtype=complex)
    b1[0] = 1.0 / n1
    b2[0] = -c / (n1 * n2)
    b2[1] = 1.0 / n2
    k1, k2 = np.linalg.norm(b1), np.linalg.norm(b2)
    a1, a2 = b1 / k1, b2 / k2
    ov = np.vdot(a1, a2)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    a2 = a2 / phase
    p1, psi1 = apply_probabilistic_masker(m, a1)
    p2, psi2 = apply_probabilistic_masker(m, a2)
    return WitnessPair(a1, a2, p1, p2, psi1, psi2, float(min(abs(ov), 1.0)))


def witness_delta_probabilistic(m: ProbabilisticMasker) -> WitnessReport:
    """Replay the probabilistic-masker proof chain.

    Lemma 1 supplies inputs ``x a1 + y e^{i theta} a2`` whose images are the
    balanced superpositions ``(psi1 + e^{i theta} psi2)/sqrt 2`` for
    ``theta = 0, pi/2``; these are compared with the A-marginal of psi1.
    """
    pair = probabilistic_witness_pair(m)
    omegas = []
    for theta in (0.0, np.pi / 2):
        sol = lemma1_solve(pair.overlap_r, theta, pair.p1, pair.p2)
        vec = sol.x * pair.a1 + sol.y * np.exp(1j * theta) * pair.a2
        omegas.append(apply_probabilistic_masker(m, vec / np.linalg.norm(vec))[1])
    ref = partial_trace_b(pair.psi1)
    return witness_from_images(pair.psi1.matrix, pair.psi2.matrix, omegas, ref)


@dataclass(frozen=True)
class StateSetEpsilon:
    eps_fidelity: float
    eps_trace: float


def epsilon_over_state_set(masker: Masker, inputs) -> StateSetEpsilon:
    """Measured masking quality over a finite set of inputs.

    ``eps_fidelity = 1 - min F`` and ``eps_trace = max ||rho - rho'||_1``,
    taken over all pairs of inputs and both subsystems.
    """
    if len(inputs) < 2:
        raise ValueError("need at least two input states")
    outs = [masked_state(masker, a) for a in inputs]
    dev_a, dev_b, fid_a, fid_b = marginal_spread(outs)
    return StateSetEpsilon(max(0.0, 1.0 - min(fid_a, fid_b)), max(dev_a, dev_b))


@dataclass(frozen=True)
class Lemma1Solution:
    x: float
    y: float
    overlap_r: float
    theta: float
    p1: float
    p2: float

    @property
    def ellipse_residual(self) -> float:
        x, y = self.x, self.y
        return abs(x * x + 2 * self.overlap_r * np.cos(self.theta) * x * y + y * y - 1.0)

    @property
    def line_residual(self) -> float:
        return abs(self.p1 * self.x - self.p2 * self.y)


def lemma1_solve(overlap_r: float, theta: float, p1: float, p2: float) -> Lemma1Solution:
    """Intersect ``x^2 + 2 r cos(theta) x y + y^2 = 1`` with ``p1 x = p2 y``.

    Returns the solution with ``x > 0``.  The denominator
    ``p1^2 + 2 r cos(theta) p1 p2 + p2^2`` is positive whenever ``r < 1``.
    """
    if not (0.0 <= overlap_r < 1.0):
        raise ValueError(f"overlap_r must lie in [0, 1), got {overlap_r}")
    if not (p1 > 0 and p2 > 0):
        raise ValueError("p1 and p2 must be positive")
    denom = p2 * p2 + 2.0 * overlap_r * np.cos(theta) * p1 * p2 + p1 * p1
    x = p2 / np.sqrt(denom)
    y = p1 / np.sqrt(denom)
    return Lemma1Solution(float(x), float(y), float(overlap_r), float(theta), float(p1), float(p2))


@dataclass(frozen=True)
class ClaimStep:
    lhs: float
    rhs_frobenius: float
    rhs_trace: float


def verify_claim_step(psi1: BipartitePureState, psi2: BipartitePureState) -> ClaimStep:
    """``|Tr(M^dag M L)| <= ||L||_2 <= ||L||_1`` with ``L = N^dag N - M^dag M``."""
    if psi1.dims != psi2.dims:
        raise DimensionError("states must have equal dimensions")
    m, n = psi1.matrix, psi2.matrix
    mdm = m.conj().T @ m
    lmat = n.conj().T @ n - mdm
    return ClaimStep(float(abs(np.trace(mdm @ lmat))), frobenius_norm(lmat), trace_norm(lmat))


@dataclass(frozen=True)
class RankTraceBound:
    lhs: float
    rhs: float


def rank_trace_bound_check(psi: BipartitePureState) -> RankTraceBound:
    """Marginal purity ``Tr((M^dag M)^2)`` against ``1/min(r, s)``."""
    m = psi.matrix
    mdm = m.conj().T @ m
    return RankTraceBound(float(np.real(np.trace(mdm @ mdm))), 1.0 / min(psi.dims))
