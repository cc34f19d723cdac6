"""Derivative-free search for maskers with small witness delta.

Unitaries are parametrized as ``exp(iH)`` with ``H`` Hermitian, which covers
the whole unitary group without constraints; the search itself is scipy's
adaptive Nelder-Mead, restarted from Gaussian initial points.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import __version__
from .bounds import epsilon_over_state_set, theoretical_bound, witness_delta_probabilistic, witness_delta_unitary
from .errors import DimensionError, MaskerError
from .masking import ProbabilisticMasker, UnitaryMasker
from .states import basis

__all__ = [
    "SCHEMA_VERSION",
    "n_unitary_params",
    "decode_hermitian",
    "decode_unitary",
    "decode_linear_map",
    "witness_delta_fixture",
    "WitnessObjective",
    "ProbabilisticWitnessObjective",
    "StateSetObjective",
    "RestartResult",
    "OptimizationRun",
    "restart_rng",
    "minimize",
]

SCHEMA_VERSION = "qmask.optimization_run/1"


def n_unitary_params(dim: int) -> int:
    return dim * dim


def decode_hermitian(params, dim: int) -> np.ndarray:
    """Hermitian matrix from ``dim`` diagonal reals then (re, im) pairs of the
    strict upper triangle in row-major order."""
    p = np.asarray(params, dtype=float)
    if p.shape != (dim * dim,):
        raise DimensionError(f"expected {dim * dim} parameters, got {p.size}")
    h = np.diag(p[:dim]).astype(complex)
    iu = np.triu_indices(dim, 1)
    off = p[dim:].reshape(-1, 2)
    h[iu] = off[:, 0] + 1j * off[:, 1]
    h[(iu[1], iu[0])] = off[:, 0] - 1j * off[:, 1]
    return h


def decode_unitary(params, dim: int) -> np.ndarray:
    """``exp(iH)`` via the eigendecomposition of ``H``; zero params give I."""
    w, v = np.linalg.eigh(decode_hermitian(params, dim))
    return (v * np.exp(1j * w)) @ v.conj().T


def decode_linear_map(params, dim_a: int, dim_b: int) -> np.ndarray:
    """Complex ``(r s) x r`` matrix from real parameters, rescaled to
    largest singular value 1."""
    n = dim_a * dim_b * dim_a
    p = np.asarray(params, dtype=float)
    if p.shape != (2 * n,):
        raise DimensionError(f"expected {2 * n} parameters, got {p.size}")
    g = (p[:n] + 1j * p[n:]).reshape(dim_a * dim_b, dim_a)
    smax = np.linalg.norm(g, 2)
    if smax == 0:
        raise MaskerError("zero linear map")
    return g / smax


def witness_delta_fixture(unitary: np.ndarray, dim_a: int, dim_b: int) -> float:
    """Witness delta for inputs ``|0>, |1>`` and ancilla ``|0>``, without validation.

    Same number as ``witness_delta_unitary(...).delta``, computed with two
    batched ``eigvalsh`` calls; this is the optimizer's inner loop.
    """
    m = unitary[:, 0].reshape(dim_a, dim_b)
    n = unitary[:, dim_b].reshape(dim_a, dim_b)
    nnh = n @ n.conj().T
    o1 = (m + n) * _INV_SQRT2
    o2 = (1j * m + n) * _INV_SQRT2
    a_side = np.stack([m @ m.conj().T - nnh, o1 @ o1.conj().T - nnh, o2 @ o2.conj().T - nnh])
    b_side = m.conj().T @ m - n.conj().T @ n
    norms_a = np.abs(np.linalg.eigvalsh(a_side)).sum(axis=1)
    norm_b = np.abs(np.linalg.eigvalsh(b_side)).sum()
    return float(max(norms_a.max(), norm_b))


_INV_SQRT2 = 1 / np.sqrt(2.0)


class WitnessObjective:
    """Witness delta of ``decode_unitary(p)`` on the fixture ``|0>, |1>`` with ancilla ``|0>``."""

    name = "witness-delta"

    def __init__(self, dim_a: int, dim_b: int):
        self.dims = (dim_a, dim_b)
        self.n_params = n_unitary_params(dim_a * dim_b)
        self.inputs = (basis(dim_a, 0), basis(dim_a, 1))
        self.ancilla = basis(dim_b, 0)

    def __call__(self, params) -> float:
        r, s = self.dims
        return witness_delta_fixture(decode_unitary(params, r * s), r, s)

    def report(self, params):
        """Full :class:`~qmask.bounds.WitnessReport` for `params`."""
        r, s = self.dims
        masker = UnitaryMasker(decode_unitary(params, r * s), self.ancilla, r, s)
        return witness_delta_unitary(masker, *self.inputs)


class ProbabilisticWitnessObjective:
    """Witness delta of the injective linear masker ``decode_linear_map(p)``."""

    name = "witness-delta-probabilistic"
    penalty = 10.0

    def __init__(self, dim_a: int, dim_b: int):
        self.dims = (dim_a, dim_b)
        self.n_params = 2 * dim_a * dim_b * dim_a

    def __call__(self, params) -> float:
        r, s = self.dims
        try:
            masker = ProbabilisticMasker(decode_linear_map(params, r, s), r, s)
        except MaskerError:
            return self.penalty
        return witness_delta_probabilistic(masker).delta


class StateSetObjective:
    """Measured epsilon of ``decode_unitary(p)`` over a fixed finite input set."""

    name = "state-set-epsilon"

    def __init__(self, dim_a: int, dim_b: int, inputs: Sequence, metric: str = "trace", ancilla=None):
        if metric not in ("trace", "fidelity"):
            raise ValueError("metric must be 'trace' or 'fidelity'")
        self.dims = (dim_a, dim_b)
        self.n_params = n_unitary_params(dim_a * dim_b)
        self.inputs = [np.asarray(a, dtype=complex) for a in inputs]
        self.metric = metric
        self.ancilla = basis(dim_b, 0) if ancilla is None else np.asarray(ancilla, dtype=complex)

    def __call__(self, params) -> float:
        if len(self.inputs) < 2:
            return 0.0
        r, s = self.dims
        masker = UnitaryMasker(decode_unitary(params, r * s), self.ancilla, r, s)
        eps = epsilon_over_state_set(masker, self.inputs)
        return eps.eps_trace if self.metric == "trace" else eps.eps_fidelity


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for restart (or trial) `index` of master `seed`."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass
class RestartResult:
    index: int
    best_value: float
    best_params: list[float]
    evaluations: int
    converged: bool
    improvements: list[tuple[int, float]] = field(default_factory=list)


@dataclass
class OptimizationRun:
    dims: list[int] | None
    objective: str
    restarts: int
    evals_per_restart: int
    seed: int
    tolerance: float
    init_scale: float
    initial_step: float
    start_at_identity: bool
    best_delta: float
    best_params: list[float]
    best_restart: int
    delta_star: float | None
    gap_to_bound: float | None
    trace: list[float]
    evaluations: list[int]
    converged: list[bool]
    wall_time: float
    tool_version: str = __version__
    schema_version: str = SCHEMA_VERSION
    history: list[RestartResult] = field(default_factory=list, repr=False)

    def to_dict(self, *, include_timing: bool = True) -> dict:
        d = asdict(self)
        d.pop("history")
        if not include_timing:
            d.pop("wall_time")
        return d

    def trace_rows(self):
        """``(restart, eval_index, best_so_far)`` at every improvement."""
        for res in self.history:
            for k, val in res.improvements:
                yield res.index, k, val


def _run_restart(job) -> RestartResult:
    objective, n_params, index, seed, evals_cap, tolerance, init_scale, init_step, at_identity = job
    if at_identity and index == 0:
        x0 = np.zeros(n_params)
    else:
        x0 = restart_rng(seed, index).normal(0.0, init_scale, n_params)
    best = [np.inf]
    count = [0]
    improvements: list[tuple[int, float]] = []

    def wrapped(x):
        val = float(objective(x))
        if val < best[0]:
            best[0] = val
            improvements.append((count[0], val))
        count[0] += 1
        return val

    simplex = np.vstack([x0, x0 + init_step * np.eye(n_params)])
    res = _scipy_minimize(
        wrapped,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": evals_cap,
            "maxiter": 10 * evals_cap,
            "xatol": np.inf,
            "fatol": tolerance,
            "adaptive": True,
            "initial_simplex": simplex,
        },
    )
    return RestartResult(
        index=index,
        best_value=float(res.fun),
        best_params=[float(v) for v in res.x],
        evaluations=count[0],
        converged=bool(res.status == 0),
        improvements=improvements,
    )


def minimize(
    objective: Callable[[np.ndarray], float],
    n_params: int | None = None,
    *,
    restarts: int = 1,
    evals_cap: int | None = None,
    seed: int = 0,
    tolerance: float = 1e-12,
    init_scale: float = np.pi / 4,
    initial_step: float = 0.5,
    start_at_identity: bool = False,
    dims: tuple[int, int] | None = None,
    workers: int = 1,
) -> OptimizationRun:
    """Multi-start Nelder-Mead.

    Restart ``i`` starts from ``N(0, init_scale^2)`` parameters drawn from
    :func:`restart_rng` (``seed``, ``i``), or from zero for restart 0 when
    `start_at_identity` is set.  A restart stops when the objective values
    on the simplex agree within `tolerance` or after `evals_cap`
    evaluations.  Restarts are independent, so running them in a process
    pool (``workers > 1``) gives the same record as running them serially.

    When `dims` is given, the bound ``delta_star(min(dims))`` and the gap to
    it are recorded.
    """
    if n_params is None:
        n_params = getattr(objective, "n_params", None)
    if dims is None:
        dims = getattr(objective, "dims", None)
    if not n_params or n_params < 1:
        raise ValueError("n_params must be a positive integer")
    if evals_cap is None:
        evals_cap = 200 * n_params
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if evals_cap < 10 * n_params:
        raise ValueError(f"evals_cap must be at least 10 * n_params = {10 * n_params}")
    if tolerance <= 0 or init_scale <= 0 or initial_step <= 0:
        raise ValueError("tolerance, init_scale and initial_step must be positive")

    start = time.perf_counter()
    jobs = [
        (objective, n_params, i, seed, evals_cap, tolerance, init_scale, initial_step, start_at_identity)
        for i in range(restarts)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(j) for j in jobs]
    wall = time.perf_counter() - start

    best = min(results, key=lambda r: (r.best_value, r.index))
    delta_star = gap = None
    if dims is not None:
        delta_star = theoretical_bound(*dims).delta_star
        gap = best.best_value - delta_star
    return OptimizationRun(
        dims=list(dims) if dims is not None else None,
        objective=getattr(objective, "name", "custom"),
        restarts=restarts,
        evals_per_restart=evals_cap,
        seed=seed,
        tolerance=tolerance,
        init_scale=init_scale,
        initial_step=initial_step,
        start_at_identity=start_at_identity,
        best_delta=best.best_value,
        best_params=best.best_params,
        best_restart=best.index,
        delta_star=delta_star,
        gap_to_bound=gap,
        trace=[r.best_value for r in results],
        evaluations=[r.evaluations for r in results],
        converged=[r.converged for r in results],
        wall_time=wall,
        history=results,
    )
