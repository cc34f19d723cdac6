"""
Exact masking of a phase family
===============================

Equal-weight superpositions that differ only in relative phases can be
masked exactly by the generalized CNOT ``|j>|k> -> |j>|k+j mod d>``.
Both marginals of every masked state are the maximally mixed state.
"""

import numpy as np

from qmask import check_exact_masking, cnot_phase_masker
from qmask.masking import phase_state
from qmask.masking import masked_state
from qmask.states import basis, partial_trace_b

rng = np.random.default_rng(0)
d = 3
masker = cnot_phase_masker(d)
inputs = [phase_state(rng.uniform(0, 2 * np.pi, d)) for _ in range(50)]
rep = check_exact_masking(masker, inputs)
print("deviations:", rep.max_marginal_deviation_a, rep.max_marginal_deviation_b)
print(np.round(rep.reference_marginals[0].real, 12))

###############################################################################
# A basis state is outside the family; its A-marginal stays pure and the
# masking fails.
print(np.round(partial_trace_b(masked_state(masker, basis(d, 0))).real, 12))
