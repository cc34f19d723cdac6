"""
How close can a masker get to the bound?
========================================

We search the unitary group for a masker with small witness delta on the
fixed inputs |0>, |1>.  Unitaries are written as exp(iH), so the search is
unconstrained over the real parameters of H.
"""

from qmask.optimizer import minimize
from qmask.optimizer import WitnessObjective

obj = WitnessObjective(2, 2)
print("identity masker delta:", obj([0.0] * obj.n_params))

run = minimize(obj, restarts=4, evals_cap=4000, seed=11, start_at_identity=True)
print("best delta:", run.best_delta, "bound:", run.delta_star, "gap:", run.gap_to_bound)
print("per-restart best:", [round(v, 4) for v in run.trace])

###############################################################################
# The best masker's full report shows which of the four norms is active.
rep = obj.report(run.best_params)
print(rep.norm_a_side, rep.norm_b_side, rep.norm_omega_1, rep.norm_omega_2)
