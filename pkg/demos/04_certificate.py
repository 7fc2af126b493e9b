"""
Certifying a cubic inequality on a sphere
=========================================

Sample the constraint set, descend from the best points and classify the
zeros of ``I``.
"""

import collections

from curvlab.certifier import eval_I, multistart_minimize, recover_multipliers, step4_point, step4_root

report = multistart_minimize(n_samples=100_000, n_starts=200, seed=42)
print("best sample value:  ", report.sample_min)
print("global minimum:     ", report.global_min_estimate)
print("argmin:             ", report.argmin.to_dict())
print("family:             ", report.equality_family, " KKT residual:", report.kkt_residual_at_argmin)
print("families of minima: ", collections.Counter(m.family for m in report.local_minima))

# The remaining critical branch has a strictly positive value.
root = step4_root()
print(f"branch root a = {root.a:.6f}, s = {root.s:.6f}, I = {root.I_value:.6f}")
p = step4_point(root)
print("I at the point:", eval_I(p), " multiplier residual:", recover_multipliers(p).residual)
