"""
A pattern that is averaged controllable without being structurally controllable
===============================================================================

One input feeds a1, a1 has a self-loop and fans out to a2 and a3.  No
constant matrix pair with this zero pattern is controllable, yet letting
the entries depend on a parameter sigma and steering only the average over
sigma works.
"""

import numpy as np

from avgctrl import SparsityPattern, analyze, monomial_certificate
from avgctrl.ensemble import EnsembleConfig, steer_average

g = SparsityPattern.from_edges(3, 1, [("b1", "a1"), ("a1", "a1"), ("a1", "a2"), ("a1", "a3")])

# The graph tests: Hall's condition fails since a1, a2, a3 only have a1 and b1 upstream.
report = analyze(g)
print(report.to_text())

# The certificate puts sigma^(depth gap + 1) on each tree edge.  Averaging the
# controllability matrix over sigma in [0, 1] gives a truncated Hilbert matrix.
cert = monomial_certificate(g)
print("\nA(sigma) =", cert.a)
print("int C    =", cert.averaged_matrix)
print("det      =", cert.determinant)

# Now steer the average numerically.  201 sigma samples, unit horizon.
a, b = cert.pair_in_original_labels()
for steps in (10, 20, 40, 80):
    cfg = EnsembleConfig(a, b, samples=201, horizon=1.0, time_steps=steps)
    res = steer_average(cfg, None, [1.0, 2.0, 3.0])
    print(f"{steps:>3} steps: average = {np.round(res.achieved_average, 6)}, "
          f"error = {res.relative_error:.2e}")

# The error shrinks about 16x per halving: fourth order in the time step.
# The Gramian is badly conditioned, though, as the Hilbert matrix suggests.
print(f"Gramian condition number ~ {res.gramian_condition:.1e}")
