"""Seeded Monte Carlo campaigns behind the command-line tool.

Trial ``i`` of a campaign with master seed ``seed`` draws everything from
``trial_rng(seed, i)``, so any single trial can be replayed in isolation
and the campaign result does not depend on how trials are scheduled.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .bounds import witness_delta_probabilistic, witness_delta_unitary
from .linalg import haar_unitary, trace_norm
from .masking import (
    ProbabilisticMasker,
    UnitaryMasker,
    check_exact_masking,
    cnot_phase_masker,
    masked_state,
    phase_state,
    simultaneous_purification_check,
)
from .optimizer import restart_rng as trial_rng
from .states import BipartitePureState, PurificationSpec, basis, partial_trace_a, partial_trace_b, random_ket

__all__ = [
    "WITNESS_COLUMNS",
    "RESIDUAL_COLUMNS",
    "CampaignSummary",
    "trial_rng",
    "random_orthonormal_pair",
    "random_probabilistic_masker",
    "witness_trial",
    "witness_campaign",
    "co_purifying_pair",
    "residual_trial",
    "residual_campaign",
    "exact_masker_report",
]

WITNESS_COLUMNS = ("trial", "seed", "r", "s", "delta", "quadratic_slack")
RESIDUAL_COLUMNS = ("trial", "seed", "kind", "r", "s", "overlap", "max_deviation", "is_consistent", "phase_collinear")


@dataclass
class CampaignSummary:
    command: str
    trials: int
    violations: int
    min_slack: float | None
    min_delta: float | None
    dims: list[list[int]]
    seed: int
    tolerance: float
    wall_time: float
    extra: dict = field(default_factory=dict)
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


def _map(fn, items, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items, chunksize=64))
    return [fn(x) for x in items]


def random_orthonormal_pair(dim: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    u = haar_unitary(dim, rng)
    return u[:, 0], u[:, 1]


def random_probabilistic_masker(dim_a: int, dim_b: int, rng: np.random.Generator) -> ProbabilisticMasker:
    """Gaussian linear map rescaled so its largest singular value is uniform in [0.05, 1]."""
    g = rng.standard_normal((dim_a * dim_b, dim_a)) + 1j * rng.standard_normal((dim_a * dim_b, dim_a))
    scale = rng.uniform(0.05, 1.0)
    return ProbabilisticMasker(scale * g / np.linalg.norm(g, 2), dim_a, dim_b)


def witness_trial(args) -> dict:
    """One witness evaluation; `args` is ``(seed, index, r, s, mode, tol)``."""
    seed, index, r, s, mode, tol = args
    rng = trial_rng(seed, index)
    if mode == "unitary":
        masker = UnitaryMasker(haar_unitary(r * s, rng), random_ket(s, rng), r, s)
        a1, a2 = random_orthonormal_pair(r, rng)
        rep = witness_delta_unitary(masker, a1, a2)
    elif mode == "probabilistic":
        rep = witness_delta_probabilistic(random_probabilistic_masker(r, s, rng))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return {
        "trial": index,
        "seed": seed,
        "r": r,
        "s": s,
        "delta": rep.delta,
        "quadratic_slack": rep.quadratic_slack,
        "chain_violations": rep.chain_violations(tol),
    }


def witness_campaign(
    dims: Sequence[tuple[int, int]],
    trials: int,
    seed: int,
    mode: str = "unitary",
    tol: float = 1e-9,
    workers: int = 1,
) -> tuple[CampaignSummary, list[dict]]:
    """Evaluate the witness inequality on `trials` random maskers.

    Trial ``i`` uses ``dims[i % len(dims)]``.  A violation is a trial with
    ``quadratic_slack < -tol``; intermediate-chain failures are counted
    separately under ``extra["chain_violations"]``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = [tuple(d) for d in dims]
    start = time.perf_counter()
    jobs = [(seed, i, *dims[i % len(dims)], mode, tol) for i in range(trials)]
    rows = _map(witness_trial, jobs, workers)
    wall = time.perf_counter() - start
    violations = sum(1 for row in rows if row["quadratic_slack"] < -tol)
    chain = sum(1 for row in rows if row["chain_violations"])
    summary = CampaignSummary(
        command=f"witness-{mode}",
        trials=trials,
        violations=violations,
        min_slack=min(row["quadratic_slack"] for row in rows),
        min_delta=min(row["delta"] for row in rows),
        dims=[list(d) for d in dims],
        seed=seed,
        tolerance=tol,
        wall_time=wall,
        extra={"chain_violations": chain, "mode": mode},
    )
    return summary, rows


def co_purifying_pair(
    dim_a: int, dim_b: int, rng: np.random.Generator, kind: str
) -> tuple[BipartitePureState, BipartitePureState]:
    """Two purifications sharing both marginals.

    ``kind``: ``"phases"`` multiplies each Schmidt term by its own phase,
    ``"degenerate"`` uses a flat spectrum and rotates the ancilla basis by a
    Haar unitary, ``"collinear"`` returns a global-phase copy.
    """
    n = min(dim_a, dim_b)
    sys_basis = haar_unitary(dim_a, rng)[:, :n]
    anc_basis = haar_unitary(dim_b, rng)[:, :n]
    if kind == "degenerate":
        lam = np.full(n, 1.0 / n)
    else:
        lam = rng.dirichlet(np.ones(n))
    first = PurificationSpec(lam, sys_basis, anc_basis)
    psi1 = first.state()
    if kind == "collinear":
        return psi1, psi1.with_phase(rng.uniform(0, 2 * np.pi))
    if kind == "phases":
        twisted = anc_basis * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    elif kind == "degenerate":
        twisted = anc_basis @ haar_unitary(n, rng)
    else:
        raise ValueError(f"unknown pair kind {kind!r}")
    return psi1, PurificationSpec(lam, sys_basis, twisted).state()


_PAIR_KINDS = ("phases", "degenerate", "collinear")


def residual_trial(args) -> dict:
    seed, index, r, s, tol, collinear_tol = args
    rng = trial_rng(seed, index)
    kind = _PAIR_KINDS[index % len(_PAIR_KINDS)]
    psi1, psi2 = co_purifying_pair(r, s, rng, kind)
    p1, p2 = rng.uniform(0.1, 1.0, 2)
    shared = max(
        trace_norm(partial_trace_b(psi1) - partial_trace_b(psi2)),
        trace_norm(partial_trace_a(psi1) - partial_trace_a(psi2)),
    )
    chk = simultaneous_purification_check(psi1, psi2, tol=tol, p1=p1, p2=p2, collinear_tol=collinear_tol)
    return {
        "trial": index,
        "seed": seed,
        "kind": kind,
        "r": r,
        "s": s,
        "overlap": abs(psi1.inner(psi2)),
        "shared_marginal_gap": shared,
        "max_deviation": chk.max_deviation,
        "is_consistent": chk.is_consistent,
        "phase_collinear": chk.forced_phase_collinear,
    }


def residual_campaign(
    trials: int,
    seed: int,
    dims: Sequence[tuple[int, int]] = ((2, 2), (2, 3), (3, 3), (3, 4), (4, 4)),
    tol: float = 1e-10,
    collinear_tol: float = 1e-6,
    workers: int = 1,
) -> tuple[CampaignSummary, list[dict]]:
    """Search co-purifying pairs for a counterexample to the no-go statement.

    Trials cycle through independent pairs of two kinds and a phase-collinear
    control group.  Violations are independent pairs that stay
    marginal-consistent under both default witness pairs, plus controls whose
    residual exceeds `tol`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dims = [tuple(d) for d in dims]
    start = time.perf_counter()
    jobs = [(seed, i, *dims[i % len(dims)], tol, collinear_tol) for i in range(trials)]
    rows = _map(residual_trial, jobs, workers)
    wall = time.perf_counter() - start
    independent = [row for row in rows if row["kind"] != "collinear" and row["overlap"] < 1 - collinear_tol]
    controls = [row for row in rows if row["kind"] == "collinear"]
    counterexamples = sum(1 for row in independent if row["is_consistent"] and not row["phase_collinear"])
    control_failures = sum(1 for row in controls if row["max_deviation"] > tol)
    summary = CampaignSummary(
        command="residual",
        trials=trials,
        violations=counterexamples + control_failures,
        min_slack=None,
        min_delta=None,
        dims=[list(d) for d in dims],
        seed=seed,
        tolerance=tol,
        wall_time=wall,
        extra={
            "independent_pairs": len(independent),
            "control_pairs": len(controls),
            "counterexamples": counterexamples,
            "control_failures": control_failures,
            "min_independent_residual": min((row["max_deviation"] for row in independent), default=None),
            "max_control_residual": max((row["max_deviation"] for row in controls), default=None),
            "max_shared_marginal_gap": max(row["shared_marginal_gap"] for row in rows),
        },
    )
    return summary, rows


def exact_masker_report(d: int, samples: int, seed: int, tol: float = 1e-10) -> dict:
    """Exactness of the phase masker on random phase states, plus an out-of-family probe."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    rng = trial_rng(seed, 0)
    masker = cnot_phase_masker(d)
    inputs = [phase_state(rng.uniform(0, 2 * np.pi, d)) for _ in range(samples)]
    rep = check_exact_masking(masker, inputs, tol)
    probe = masked_state(masker, basis(d, 0))
    ref_a, ref_b = rep.reference_marginals
    return {
        "d": d,
        "samples": samples,
        "seed": seed,
        "tolerance": tol,
        "max_deviation_a": rep.max_marginal_deviation_a,
        "max_deviation_b": rep.max_marginal_deviation_b,
        "min_fidelity_a": rep.pairwise_min_fidelity_a,
        "min_fidelity_b": rep.pairwise_min_fidelity_b,
        "exact": rep.exact,
        "probe_deviation_a": trace_norm(partial_trace_b(probe) - ref_a),
        "probe_deviation_b": trace_norm(partial_trace_a(probe) - ref_b),
        "tool_version": __version__,
    }
