"""Numerical toolkit for quantum masking no-go bounds."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundResult,
    WitnessReport,
    epsilon_over_state_set,
    lemma1_solve,
    rank_trace_bound_check,
    theoretical_bound,
    verify_claim_step,
    witness_delta_probabilistic,
    witness_delta_unitary,
)
from .linalg import (  # noqa: E402
    fidelity,
    frobenius_norm,
    haar_unitary,
    hermitian_eigen,
    psd_sqrt,
    random_density_matrix,
    svd,
    trace_norm,
)
from .masking import (  # noqa: E402
    ProbabilisticMasker,
    UnitaryMasker,
    apply_probabilistic_masker,
    apply_unitary_masker,
    check_exact_masking,
    cnot_phase_masker,
    probabilistic_masking_residual,
    simultaneous_purification_check,
)
from .states import (  # noqa: E402
    BipartitePureState,
    PurificationSpec,
    partial_trace_a,
    partial_trace_b,
    partial_trace_dense,
    purify,
    superpose,
)
