"""
Probabilistic masking and shared purifications
==============================================

Two bipartite states with the same marginals on both sides can only be
images of a successful probabilistic masker if every superposition keeps
its marginals too.  Unless the states differ by a global phase, some
superposition breaks this.
"""

import numpy as np

from qmask.campaigns import co_purifying_pair
from qmask.masking import DEFAULT_WITNESS_PAIRS, probabilistic_masking_residual, simultaneous_purification_check

rng = np.random.default_rng(3)

psi1, psi2 = co_purifying_pair(3, 3, rng, "phases")
print("overlap:", abs(psi1.inner(psi2)))
for u, v in DEFAULT_WITNESS_PAIRS:
    print("residual for (u, v) =", np.round([u, v], 3), probabilistic_masking_residual(psi1, psi2, 0.6, 0.8, u, v))

chk = simultaneous_purification_check(psi1, psi2, p1=0.6, p2=0.8)
print("consistent:", chk.is_consistent, "phase collinear:", chk.forced_phase_collinear)

###############################################################################
# A global-phase copy is the only consistent case.
psi1, psi2 = co_purifying_pair(3, 3, rng, "collinear")
print(simultaneous_purification_check(psi1, psi2, p1=0.6, p2=0.8))
