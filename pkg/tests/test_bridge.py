import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from c2convex import (
    BridgeKind,
    EndpointData,
    InfeasibleReason,
    PiecewiseFn,
    check_convex,
    disagreement_measure,
    edge_ramped_density,
    epsilon_bound,
    feasibility,
    glue,
    height_certificate,
    hermite_bridge,
    second_antiderivative,
    squeeze_check,
    triangle_bump,
    verify,
)
from c2convex.bridge import ramp_moments, zero_density
from c2convex.errors import (
    AgreementPreconditionFailed,
    CertificateViolated,
    Infeasible,
    InfeasibleCentroid,
    NegativeDensity,
    NotC2OnFlanks,
    ResidualInfeasible,
)
from c2convex.oracle import fd_check, quad_moments

Z = EndpointData(0.0, 0.0, 0.0, 0.0)


def E(x, v, s, k=0.0):
    return EndpointData(x, v, s, k)


# feasibility -----------------------------------------------------------------


@pytest.mark.parametrize(
    "left,right,expected",
    [
        (Z, E(1, 0, 0), "Linear"),
        (E(0, 0, 0, 2), E(1, 0, 0, 2), "Infeasible(OnTangent)"),
        (Z, E(1, 0.5, 1), "Strict(P=1.0, tau=0.5)"),
        (Z, E(1, 1, 1), "Infeasible(AboveSecant)"),
        (Z, E(1, -0.5, 1), "Infeasible(BelowTangent)"),
        (E(0, 0, 1), E(1, 0.5, 0), "Infeasible(NegativeMass)"),
        (Z, E(1, 0.3, 0, 1.0), "Infeasible(CurvatureIncompatible)"),
    ],
)
def test_feasibility_table(left, right, expected):
    assert str(feasibility(1.0, left, right)) == expected


def test_strict_tau_cross_checked_by_quadrature():
    feas = feasibility(1.0, Z, E(1, 0.5, 1))
    b = hermite_bridge(Z, E(1, 0.5, 1))
    m0, m1 = quad_moments(b.density, (0, 1), points=b.density.ts)
    # u(1) = u(0) + u'(0) + int (1 - t) h ; u'(1) = u'(0) + int h
    assert m0 == pytest.approx(feas.P, abs=1e-10)
    assert m0 - m1 == pytest.approx(0.5, abs=1e-10)
    assert m1 / m0 == pytest.approx(feas.tau, abs=1e-10)


# densities -------------------------------------------------------------------


def test_triangle_examples():
    d = triangle_bump(2, 1, 0.5)
    assert d.nodes == [(0.0, 0.0), (0.5, 2.0), (1.0, 0.0), (2.0, 0.0)]
    assert d.height == 2.0
    q = quad_moments(d, (0, 2), points=d.ts)
    np.testing.assert_allclose(q, (1.0, 0.5), atol=1e-12)
    m = triangle_bump(2, 1, 1.5)
    assert m.nodes == [(0.0, 0.0), (1.0, 0.0), (1.5, 2.0), (2.0, 0.0)]
    ts = np.linspace(0, 2, 101)
    np.testing.assert_allclose(m(ts), d(2 - ts), atol=1e-15)


def test_triangle_rejects_bad_centroid():
    with pytest.raises(InfeasibleCentroid):
        triangle_bump(1, 1, 1.0)
    with pytest.raises(InfeasibleCentroid):
        triangle_bump(1, 1, 0.0)


def test_edge_ramped_example():
    mass, moment = ramp_moments(1, 2, 2, 0.25)
    assert mass == pytest.approx(0.5)
    assert moment == pytest.approx(2 * 0.25**2 / 6 + 2 * 0.125 * (1 - 0.25 / 3))
    d = edge_ramped_density(1, 2, 2, 3, 0.5, 0.25)
    assert d.hs[0] == 2 and d.hs[-1] == 2
    # residual triangle is symmetric (centroid 0.5), so the density is too
    ts = np.linspace(0, 1, 101)
    np.testing.assert_allclose(d(ts), d(1 - ts), atol=1e-12)
    q = quad_moments(d, (0, 1), points=d.ts)
    np.testing.assert_allclose(q, (3.0, 1.5), rtol=1e-10)
    np.testing.assert_allclose(d.closed_form_moments(), (3.0, 1.5), rtol=1e-14)


def test_edge_ramped_residual_infeasible():
    with pytest.raises(ResidualInfeasible):
        edge_ramped_density(1, 2, 0, 0.2, 0.9, 0.25)


# second antiderivative -------------------------------------------------------


def test_second_antiderivative_symmetric():
    d = triangle_bump(1, 1, 0.5)
    b = second_antiderivative(d, Z)
    m0, m1 = quad_moments(d, (0, 1), points=d.ts)
    assert b.fn.eval(1.0) == pytest.approx(m0 - m1, abs=1e-10)
    assert b.fn.eval(1.0) == pytest.approx(0.5, abs=1e-15)
    assert b.fn.eval(1.0, 1) == pytest.approx(1.0, abs=1e-15)


def test_second_antiderivative_segment_degrees():
    b = second_antiderivative(triangle_bump(2, 1, 0.5), Z)
    assert b.fn.breakpoints.tolist() == [0.0, 0.5, 1.0, 2.0]
    assert [c.size - 1 for c in b.fn.segments] == [3, 3, 1]
    assert b.fn.segments[2].tolist() == [pytest.approx(0.5), pytest.approx(1.0)]
    assert fd_check(b.fn, 0.5, 2) == pytest.approx(2.0, abs=1e-3)


# epsilon bound and certificate -----------------------------------------------


def _grid_eps(h, c, n=100001):
    xs = np.linspace(0, c, n)
    hv = np.array([float(h(x)) for x in xs])
    F = np.concatenate(([0.0], np.cumsum(np.diff(xs) * (hv[1:] + hv[:-1]) / 2)))
    left = np.max(F[1:] / xs[1:])
    right = np.max((F[-1] - F[:-1][::-1]) / xs[1:])
    return max(left, right, hv[0], hv[-1])


def test_epsilon_linear_density():
    h = PiecewiseFn([0, 1], [[0, 1]])
    assert epsilon_bound(h) == pytest.approx(1.0, abs=1e-15)
    assert _grid_eps(h, 1.0) == pytest.approx(1.0, abs=1e-6)


def test_epsilon_triangle():
    d = triangle_bump(2, 1, 0.5)
    eps = epsilon_bound(d)
    assert eps == pytest.approx(4 - 2 * math.sqrt(2), abs=1e-12)
    assert _grid_eps(d, 2.0) == pytest.approx(eps, abs=1e-6)
    # attained at x = 1/sqrt(2) in the left average
    x = 1 / math.sqrt(2)
    F = 0.5 + 2 * (x - 0.5) - 2 * (x - 0.5) ** 2
    assert F / x == pytest.approx(eps, abs=1e-12)


def test_epsilon_rejects_negative():
    with pytest.raises(NegativeDensity):
        epsilon_bound(PiecewiseFn([0, 1], [[1, -2]]))


def test_height_certificate():
    d = triangle_bump(2, 1, 0.5)
    H, bound = height_certificate(d, epsilon_bound(d))
    assert H == 2.0 and bound == pytest.approx(4 * (4 - 2 * math.sqrt(2)))
    z = zero_density(1.0)
    assert height_certificate(z, epsilon_bound(z)) == (0.0, 0.0)
    with pytest.raises(CertificateViolated):
        height_certificate(d, 0.4)


# Hermite bridges -------------------------------------------------------------


def test_triangle_bridge():
    b = hermite_bridge(Z, E(1, 0.5, 1))
    assert b.kind is BridgeKind.TRIANGLE
    assert np.max(b.residuals()) == 0.0
    assert b.fn.eval(0, 2) == 0.0 and b.fn.eval(1, 2, "left") == 0.0


def test_bridge_obstruction_and_secant():
    with pytest.raises(Infeasible) as e:
        hermite_bridge(E(0, 0, 0, 2), E(1, 0, 0, 2))
    assert e.value.reason is InfeasibleReason.ON_TANGENT
    with pytest.raises(Infeasible) as e:
        hermite_bridge(Z, E(1, 1, 1))
    assert e.value.reason is InfeasibleReason.ABOVE_SECANT


def test_linear_bridge():
    b = hermite_bridge(E(0, 1, 2), E(1, 3, 2))
    assert b.kind is BridgeKind.LINEAR
    assert b.fn.degree == 1


endpoint = st.tuples(
    st.floats(-5, 5),  # value
    st.floats(-5, 5),  # slope
    st.floats(0, 20),  # curvature
)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(1e-4, 10),
    endpoint,
    st.floats(0.01, 20),
    st.floats(0.001, 0.999),
    st.floats(0, 20),
)
def test_random_feasible_bridge(c, left, P, u, B):
    v, s, A = left
    tau = u * c
    lft = E(0.0, v, s, A)
    rgt = E(c, v + s * c + P * (c - tau), s + P, B)
    feas = feasibility(c, lft, rgt)
    if not feas.ok:  # data within rounding of the boundary
        return
    b = hermite_bridge(lft, rgt)
    scale = b.scale()
    res = b.residuals()
    assert res[:, 0].max() <= 1e-9 * scale
    assert res[:, 1].max() <= 1e-9 * scale / c
    assert res[:, 2].max() <= 1e-9 * scale / c**2
    assert np.min(b.density.hs) >= 0.0
    np.testing.assert_allclose(b.density.closed_form_moments()[0], feas.P, rtol=1e-9)


# glue and squeeze ------------------------------------------------------------


def test_glue_flat_fn(flat_fn):
    f = check_convex(flat_fn)
    g = glue(f, 0.0, 1.0, 0.25)
    assert g.is_c2
    assert disagreement_measure(f, g) == pytest.approx(1.5, abs=1e-14)
    for lo, hi in ((-1, -0.25), (1.25, 2)):
        xs = np.linspace(lo, hi, 50)
        np.testing.assert_allclose(g(xs), f(xs), rtol=0, atol=1e-15)
    verify(f, g)


def test_glue_x_squared_edge_ramped():
    from c2convex.bridge import glue_bridge

    f = check_convex(PiecewiseFn.from_global([-1, 1], [[0, 0, 1]]))
    b = glue_bridge(f, -0.5, 0.5, 0.1)
    assert b.kind is BridgeKind.EDGE_RAMPED
    assert b.fn.domain == pytest.approx((-0.6, 0.6))
    assert (b.left.curvature, b.right.curvature) == pytest.approx((2.0, 2.0))
    verify(f, glue(f, -0.5, 0.5, 0.1))


def test_glue_equality_case():
    # (x+1)^4, 0, (x-1)^4: C^2 everywhere, linear on the middle
    f = check_convex(
        PiecewiseFn([-2, -1, 1, 2], [[1, -4, 6, -4, 1], [0], [0, 0, 0, 0, 1]])
    )
    assert f.is_c2
    assert glue(f, -0.5, 0.5, 0.25) is f
    lin = check_convex(PiecewiseFn([-2, 2], [[-3, 2]]))
    assert glue(lin, -0.5, 0.5, 0.25) is lin


def test_glue_requires_c2_flanks(abs_fn, flat_fn):
    with pytest.raises(NotC2OnFlanks):
        glue(check_convex(flat_fn), 0.5, 0.8, 0.1)
    f = check_convex(PiecewiseFn.from_global([-1, 0, 1], [[0, 0, 1], [0, 0, 1]]))
    assert glue(f, -0.2, 0.2, 0.1).is_c2
    with pytest.raises(ValueError):
        glue(f, -0.2, 0.2, 0.9)


def test_squeeze_exact():
    f = PiecewiseFn([0, 1], [[0, 0, 1]])
    g = PiecewiseFn.linear_interpolant([0, 0.5, 1], [0, 0.25, 1])
    sup, bound = squeeze_check(f, g, 0, 0.5, 1)
    assert sup == pytest.approx(0.0625, abs=1e-12)
    assert bound == 4.0
    with pytest.raises(AgreementPreconditionFailed):
        squeeze_check(f, PiecewiseFn([0, 1], [[0, 1]]), 0, 0.5, 1)
