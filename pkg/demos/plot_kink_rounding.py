"""
Rounding a kink with a box of curvature
========================================

A slope jump J at x0 is a point mass J in f''.  Spreading it as the box
J / (2 delta) on [x0 - delta, x0 + delta] keeps mass and centroid, so the
function is unchanged outside the box.
"""

import numpy as np

from c2convex import PiecewiseFn, check_convex, round_kinks

f = check_convex(PiecewiseFn.from_global([-1.0, 0.0, 1.0], [[0, -1], [0, 1]]))
g, kinks = round_kinks(f, budget=0.2)
k = kinks[0]
print(f"kink at {k.location}, jump {k.jump}, radius {k.radius}, box height {k.height}")
print("box moments (mass, first moment):", k.box_moments())

xs = np.array([-0.1, -0.05, 0.0, 0.05, 0.1, 0.5])
for x, fx, gx in zip(xs, f(xs), g(xs)):
    print(f"  x = {x:+.2f}   |x| = {fx:.4f}   rounded = {gx:.4f}")
print("regularity of the rounded function:", [r.name for r in g.regularity])
