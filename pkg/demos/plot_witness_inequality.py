"""
Checking the witness inequality on random maskers
=================================================

The witness delta collects four trace-norm distances between marginals of
masked states.  For every masker it must satisfy ``9 d^2 + d - 1/t >= 0``.
Here we sample Haar-random unitary maskers and random probabilistic ones
and look at the slack.
"""

import numpy as np

from qmask import UnitaryMasker, haar_unitary, witness_delta_unitary
from qmask.states import random_ket
from qmask.campaigns import witness_campaign

rng = np.random.default_rng(7)

masker = UnitaryMasker(haar_unitary(6, rng), random_ket(3, rng), 2, 3)
rep = witness_delta_unitary(masker)
print("four norms:", rep.norm_a_side, rep.norm_b_side, rep.norm_omega_1, rep.norm_omega_2)
print("delta =", rep.delta, " slack =", rep.quadratic_slack)

# The proof passes through intermediate inequalities; the report keeps them
print("||M N^dag||_1 <= 3 delta:", rep.cross_norm_mn, "<=", 3 * rep.delta)
print("violated chain steps:", rep.chain_violations())

###############################################################################
# A small campaign over several dimension pairs.  Trial i draws from its own
# seeded stream, so any row can be replayed alone.
for mode in ("unitary", "probabilistic"):
    summary, rows = witness_campaign([(2, 2), (2, 3), (3, 3)], 300, seed=1, mode=mode)
    print(mode, "violations:", summary.violations, "min slack:", round(summary.min_slack, 3))
