"""
The universal lower bound on approximate masking
================================================

No single unitary masks every state of a qudit.  The best it can do is
make the marginals of different inputs close, and how close is limited by
``t = min(r, s)``.  This script tabulates the limit.
"""

import numpy as np

from qmask import theoretical_bound

# The witness delta of any masker obeys 9 d^2 + d >= 1/t, so delta is at
# least the positive root.  In the linear conversion convention epsilon is
# delta / (2 sqrt 2).
for t in (2, 3, 4, 8, 16, 64):
    b = theoretical_bound(t, t)
    print(f"t={t:3d}  delta*={b.delta_star:.6f}  epsilon*={b.epsilon_star:.6f}  "
          f"epsilon* (fidelity route)={b.epsilon_star_via_fidelity:.3e}")

# Growing the larger subsystem does not help, only t matters
print(theoretical_bound(2, 2).delta_star == theoretical_bound(2, 50).delta_star)

###############################################################################
# For large t the bound approaches 1/t: 9 d^2 is negligible next to d.
ts = np.array([16, 64, 256, 1024])
print([round(float(theoretical_bound(t, t).delta_star * t), 4) for t in ts])
