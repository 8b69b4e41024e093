"""
Error profiles that tighten toward the boundary
================================================

With a cell decomposition each cell gets its own correction budget, so the
pointwise error can follow a profile that shrinks near the ends.
"""

from c2convex import PiecewiseFn, ToleranceConfig, approximate_graded, profile_violation

f = PiecewiseFn.from_global([-1.0, 0.0, 1.0], [[0, -1], [0, 1]])
# tent-shaped profile: 0.05 in the middle, 0.005 at the ends
profile = PiecewiseFn.linear_interpolant([-1.0, 0.0, 1.0], [0.005, 0.05, 0.005])
cfg = ToleranceConfig(measure_budget=0.1, error_profile=profile)
g, report = approximate_graded(f, cfg, cells=[-1.0, -0.5, 0.5, 1.0])
print("disagreement:", report.disagreement)
print("profile slack (<= 0 means satisfied):", profile_violation(f, g, profile))
print("g is C2:", g.is_c2)
