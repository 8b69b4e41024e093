"""
Why one bridge over the flat part is not enough
================================================

The function x^2, 0, (x - 1)^2 on [-1, 2] is convex and C^1, but its
curvature jumps at 0 and 1.  Bridging straight across [0, 1] fails: the
right end lies exactly on the left tangent line.
"""

from c2convex import EndpointData, PiecewiseFn, ToleranceConfig, approximate, feasibility, tangent_gap

f = PiecewiseFn.from_global([-1.0, 0.0, 1.0, 2.0], [[0, 0, 1], [0], [1, -2, 1]])

# value, slope and curvature at both ends of [0, 1]
left = EndpointData(0.0, 0.0, 0.0, 2.0)
right = EndpointData(1.0, 0.0, 0.0, 2.0)
print("bridge over [0, 1]:", feasibility(1.0, left, right))
print("tangent gap f(1) - f(0) - f'(0):", tangent_gap(f, 0.0, 1.0))

# widen the window and the gap opens up
print("tangent gap over [-0.25, 1.25]:", tangent_gap(f, -0.25, 1.25))

# the pipeline instead works locally, one small window per curvature jump
g, report = approximate(f, ToleranceConfig(measure_budget=0.2, error_profile=0.05))
for iv in report.intervals:
    print(f"  corrected [{iv.a:+.4f}, {iv.b:+.4f}] with a {iv.bridge.kind.value} bridge")
print("measure of {f != g}:", report.disagreement)
print("sup |f - g|:", report.sup_error_global)
print("g is C2:", g.is_c2)
