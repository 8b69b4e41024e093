"""
Triangle bumps and the height certificate
==========================================

A bridge of width c is the second antiderivative of a nonnegative density
with prescribed mass P and centroid tau.  The triangle with apex at 0 or c
does this with height P / tau or P / (c - tau), and that height never
exceeds four times the largest one-sided average of any admissible density.
"""

import math

from c2convex import EndpointData, epsilon_bound, height_certificate, hermite_bridge, triangle_bump

d = triangle_bump(2.0, 1.0, 0.5)
print("nodes:", d.nodes)
print("mass, first moment:", d.closed_form_moments())

eps = epsilon_bound(d)
print("largest one-sided average:", eps, " (4 - 2 sqrt 2 =", 4 - 2 * math.sqrt(2), ")")
H, bound = height_certificate(d, eps)
print(f"height {H} <= 4 eps = {bound:.6f}")

# a full bridge from zero data to value 0.5, slope 1 at x = 1
b = hermite_bridge(EndpointData(0.0, 0.0, 0.0, 0.0), EndpointData(1.0, 0.5, 1.0, 0.0))
print("bridge kind:", b.kind.value, " endpoint residuals:", b.residuals())

# halving the width and quartering the mass halves the height
for i in range(5):
    c = 1.0 / 2**i
    print(f"  c = {c:.4f}  height = {triangle_bump(c, 1.0 / 4**i, 0.3 * c).height:.6f}")
