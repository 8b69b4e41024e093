"""
Cross-checking exact answers with the sampling oracle
======================================================

Everything the library computes in closed form can be re-estimated by
quadrature, finite differences and Monte Carlo, which only ever evaluate
the functions pointwise.
"""

from c2convex import PiecewiseFn, ToleranceConfig, approximate, triangle_bump
from c2convex.oracle import OracleConfig, fd_check, quad_moments, sample_checks

d = triangle_bump(2.0, 1.0, 0.5)
print("exact moments:     ", d.closed_form_moments())
print("quadrature moments:", quad_moments(d, (0.0, 2.0), points=d.ts))

f = PiecewiseFn.from_global([-1.0, 0.0, 1.0, 2.0], [[0, 0, 1], [0], [1, -2, 1]])
g, report = approximate(f, ToleranceConfig(0.2, 0.05))
s = sample_checks(f, g.fn, f.domain, OracleConfig.from_env())
print("exact disagreement:", report.disagreement)
print(f"Monte-Carlo estimate: {s.mc_measure:.5f} +- {s.sigma_for(report.disagreement):.5f}")
print("grid convexity violations:", s.convexity_violations)
print("g''(0.5) by finite differences:", fd_check(g.fn, 0.5, 2))
