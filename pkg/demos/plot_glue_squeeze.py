"""
Gluing over a window and the squeeze bound
===========================================

Between two C^2 stretches of a convex function we can swap in a bridge on
[beta - eps, gamma + eps].  Separately, two convex functions agreeing at
three points cannot drift apart by more than 2 L (gamma - alpha).
"""

from c2convex import PiecewiseFn, check_convex, disagreement_measure, glue, squeeze_check

f = check_convex(PiecewiseFn.from_global([-1.0, 0.0, 1.0, 2.0], [[0, 0, 1], [0], [1, -2, 1]]))
g = glue(f, beta=0.0, gamma=1.0, eps=0.25)
print("glued function is C2:", g.is_c2)
print("measure where it differs from f:", disagreement_measure(f, g))

sq = PiecewiseFn([0.0, 1.0], [[0, 0, 1]])
chord = PiecewiseFn.linear_interpolant([0.0, 0.5, 1.0], [0.0, 0.25, 1.0])
sup, bound = squeeze_check(sq, chord, 0.0, 0.5, 1.0)
print(f"x^2 vs its 3-point interpolant: sup = {sup}, bound = {bound}")
