"""Convex C^2 bridges between prescribed endpoint jets.

A bridge on ``[x0, x0 + c]`` is the second antiderivative of a nonnegative
piecewise-linear density ``h``.  Matching the right endpoint's value and
slope fixes two moments of ``h``::

    P     = int_0^c h(t) dt       = slope_right - slope_left
    P*tau = int_0^c t h(t) dt,    tau = c - D / P,
    D     = value_right - value_left - slope_left * c

so any density with this mass and centroid works.  With zero endpoint
curvature the canonical choice is an isosceles triangle of area ``P``
centred at ``tau``; with nonzero curvature, linear edge ramps carry the
endpoint values and a residual triangle carries the remaining moments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _poly
from .errors import (
    AgreementPreconditionFailed,
    CertificateViolated,
    GlueInfeasible,
    Infeasible,
    InfeasibleCentroid,
    NegativeDensity,
    NotC2OnFlanks,
    ResidualInfeasible,
    ShrinkExhausted,
    TangentGapNegative,
)
from .piecewise import (
    ConvexFn,
    PiecewiseFn,
    Regularity,
    _fn,
    check_convex,
    lipschitz_const,
    splice,
    sup_abs_diff,
    tangent_gap,
)

# Relative slack for the feasibility tests: a few ulp of the value/slope scale,
# so genuine gaps on very short intervals are not mistaken for round-off.
FEAS_RTOL = 1e-14
MAX_HALVINGS = 60


class BridgeKind(str, enum.Enum):
    LINEAR = "Linear"
    TRIANGLE = "Triangle"
    EDGE_RAMPED = "EdgeRamped"


class InfeasibleReason(str, enum.Enum):
    NEGATIVE_MASS = "NegativeMass"
    ON_TANGENT = "OnTangent"
    BELOW_TANGENT = "BelowTangent"
    ABOVE_SECANT = "AboveSecant"
    CURVATURE_INCOMPATIBLE = "CurvatureIncompatible"


@dataclass(frozen=True)
class EndpointData:
    x: float
    value: float
    slope: float
    curvature: float = 0.0

    def __post_init__(self):
        if not self.curvature >= 0.0:
            raise ValueError(f"endpoint curvature must be >= 0, got {self.curvature!r}")


def endpoint_data(f, x: float) -> EndpointData:
    """Value, slope and curvature of ``f`` at ``x`` (a C^2 point of ``f``).

    Curvature round-off below zero is clamped.
    """
    f = _fn(f)
    k = f.eval(x, 2)
    return EndpointData(float(x), f.eval(x), f.eval(x, 1), max(k, 0.0))


@dataclass(frozen=True)
class Feasibility:
    variant: str  # "linear" | "strict" | "infeasible"
    P: float = 0.0
    tau: float = 0.0
    reason: InfeasibleReason | None = None

    @property
    def ok(self) -> bool:
        return self.variant != "infeasible"

    def __str__(self):
        if self.variant == "strict":
            return f"Strict(P={self.P!r}, tau={self.tau!r})"
        if self.variant == "linear":
            return "Linear"
        return f"Infeasible({self.reason.value})"


def feasibility(c: float, left: EndpointData, right: EndpointData, rtol: float = FEAS_RTOL) -> Feasibility:
    """Classify endpoint data for a convex C^2 bridge over length ``c``."""
    if not c > 0:
        raise ValueError("interval length must be positive")
    P = right.slope - left.slope
    D = right.value - left.value - left.slope * c
    tol_P = rtol * max(abs(left.slope), abs(right.slope))
    tol_D = rtol * max(abs(left.value), abs(right.value), abs(left.slope) * c, abs(right.slope) * c)
    curved = left.curvature > 0.0 or right.curvature > 0.0

    def bad(reason):
        return Feasibility("infeasible", P, float("nan"), reason)

    if P < -tol_P:
        return bad(InfeasibleReason.NEGATIVE_MASS)
    flat = abs(P) <= tol_P
    if abs(D) <= tol_D:
        if flat and not curved:
            return Feasibility("linear", 0.0, 0.5 * c)
        return bad(InfeasibleReason.ON_TANGENT)
    if flat:
        if curved:
            return bad(InfeasibleReason.CURVATURE_INCOMPATIBLE)
        return bad(InfeasibleReason.BELOW_TANGENT if D < 0 else InfeasibleReason.ABOVE_SECANT)
    if D < 0:
        return bad(InfeasibleReason.BELOW_TANGENT)
    if D >= P * c - tol_D:
        return bad(InfeasibleReason.ABOVE_SECANT)
    return Feasibility("strict", P, c - D / P)


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True)
class BumpDensity:
    """Piecewise-linear density on ``[0, c]`` given by its nodes."""

    c: float
    ts: np.ndarray
    hs: np.ndarray
    mass: float
    centroid: float
    height: float

    @property
    def nodes(self) -> list[tuple[float, float]]:
        return list(zip(self.ts.tolist(), self.hs.tolist()))

    def __call__(self, t):
        return np.interp(t, self.ts, self.hs)

    def closed_form_moments(self) -> tuple[float, float]:
        """Exact ``(int h, int t h)`` summed over the linear pieces."""
        t0, t1 = self.ts[:-1], self.ts[1:]
        h0, h1 = self.hs[:-1], self.hs[1:]
        L = t1 - t0
        mass = np.sum(L * (h0 + h1)) / 2.0
        moment = np.sum(L * (h0 * (2 * t0 + t1) + h1 * (t0 + 2 * t1))) / 6.0
        return float(mass), float(moment)

    def as_piecewise(self, origin: float = 0.0) -> PiecewiseFn:
        ts, hs = self.ts, self.hs
        slopes = np.diff(hs) / np.diff(ts)
        return PiecewiseFn(origin + ts, [[h, s] for h, s in zip(hs[:-1], slopes)])

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "nodes": [list(n) for n in self.nodes],
            "P": self.mass,
            "tau": self.centroid,
            "H": self.height,
        }


def _density(c, ts, hs, mass, centroid) -> BumpDensity:
    ts = np.asarray(ts, dtype=float)
    hs = np.asarray(hs, dtype=float)
    keep = np.concatenate(([True], np.diff(ts) > 0))
    ts, hs = ts[keep], hs[keep]
    if np.any(hs < 0):
        raise NegativeDensity(f"negative node value {hs.min()!r}")
    ts.setflags(write=False)
    hs.setflags(write=False)
    return BumpDensity(float(c), ts, hs, float(mass), float(centroid), float(hs.max()))


def zero_density(c: float) -> BumpDensity:
    return _density(c, [0.0, c], [0.0, 0.0], 0.0, 0.5 * c)


def triangle_bump(c: float, P: float, tau: float) -> BumpDensity:
    """Isosceles triangle of area ``P`` and centroid ``tau`` inside ``[0, c]``.

    The base is ``[0, 2 tau]`` when ``tau <= c/2`` (height ``P / tau``) and
    ``[2 tau - c, c]`` otherwise (height ``P / (c - tau)``).
    """
    if not 0.0 < tau < c:
        raise InfeasibleCentroid(f"centroid {tau!r} not in (0, {c!r})")
    if not P > 0:
        raise ValueError(f"mass must be positive, got {P!r}")
    if tau <= 0.5 * c:
        H = P / tau
        ts = [0.0, tau, min(2.0 * tau, c), c]
        hs = [0.0, H, 0.0, 0.0]
    else:
        H = P / (c - tau)
        ts = [0.0, max(2.0 * tau - c, 0.0), tau, c]
        hs = [0.0, 0.0, H, 0.0]
    return _density(c, ts, hs, P, tau)


def ramp_moments(c: float, A: float, B: float, w: float) -> tuple[float, float]:
    """Mass and first moment of the two edge ramps of width ``w``."""
    mass = 0.5 * w * (A + B)
    moment = A * w * w / 6.0 + 0.5 * B * w * (c - w / 3.0)
    return mass, moment


def edge_ramped_density(c: float, A: float, B: float, P: float, tau: float, w: float) -> BumpDensity:
    """Edge ramps from ``A`` at 0 and to ``B`` at ``c`` plus a residual triangle.

    Raises ResidualInfeasible when the ramps leave no valid residual
    (nonpositive mass or centroid outside ``(0, c)``); shrink ``w`` and retry.
    """
    if A < 0 or B < 0:
        raise ValueError("endpoint curvatures must be nonnegative")
    if A == 0.0 and B == 0.0:
        return triangle_bump(c, P, tau)
    if not 0.0 < w <= 0.25 * c:
        raise ValueError(f"ramp width {w!r} not in (0, c/4]")
    ramp_mass, ramp_moment = ramp_moments(c, A, B, w)
    P_r = P - ramp_mass
    if not P_r > 0:
        raise ResidualInfeasible(f"residual mass {P_r!r} <= 0")
    tau_r = (P * tau - ramp_moment) / P_r
    if not 0.0 < tau_r < c:
        raise ResidualInfeasible(f"residual centroid {tau_r!r} outside (0, {c!r})")
    tri = triangle_bump(c, P_r, tau_r)
    ts = np.unique(np.concatenate(([0.0, w, c - w, c], tri.ts)))
    hs = (
        A * np.maximum(0.0, 1.0 - ts / w)
        + B * np.maximum(0.0, (ts - (c - w)) / w)
        + np.interp(ts, tri.ts, tri.hs)
    )
    hs[0], hs[-1] = A, B
    return _density(c, ts, hs, P, tau)


# ---------------------------------------------------------------------------
# bridges


@dataclass(frozen=True)
class Bridge:
    fn: PiecewiseFn
    left: EndpointData
    right: EndpointData
    density: BumpDensity
    kind: BridgeKind

    def residuals(self) -> np.ndarray:
        """``|bridge - target|`` for value, slope, curvature at both ends, shape (2, 3)."""
        out = np.zeros((2, 3))
        a, b = self.fn.domain
        for row, (x, side, d) in enumerate(((a, "right", self.left), (b, "left", self.right))):
            target = (d.value, d.slope, d.curvature)
            for k in range(3):
                out[row, k] = abs(self.fn.eval(x, k, side) - target[k])
        return out

    def scale(self) -> float:
        c = self.right.x - self.left.x
        vals = (self.left, self.right)
        return max(
            max(abs(d.value) for d in vals),
            max(abs(d.slope) for d in vals) * c,
            self.density.height * c * c,
            1e-300,
        )


def second_antiderivative(density: BumpDensity, left: EndpointData, right_x: float | None = None) -> Bridge:
    """Piecewise cubic ``u`` with ``u(x0), u'(x0)`` from ``left`` and ``u'' = density``.

    Integrates each linear density piece in closed form.  ``right_x`` pins the
    last breakpoint exactly (default ``left.x + density.c``).
    """
    x0 = left.x
    xs = x0 + density.ts
    xs[-1] = x0 + density.c if right_x is None else right_x
    keep = np.concatenate((np.diff(xs) > 0, [True]))
    keep[0] = True
    xs, hs = xs[keep], density.hs[keep]
    U0, U1 = left.value, left.slope
    segs = []
    for k in range(xs.size - 1):
        L = xs[k + 1] - xs[k]
        h0 = hs[k]
        s = (hs[k + 1] - h0) / L
        segs.append([U0, U1, h0 / 2.0, s / 6.0])
        U0 = U0 + U1 * L + h0 * L * L / 2.0 + s * L**3 / 6.0
        U1 = U1 + h0 * L + s * L * L / 2.0
    fn = PiecewiseFn(xs, segs)
    right = EndpointData(float(xs[-1]), U0, U1, float(hs[-1]))
    if density.height == 0.0:
        kind = BridgeKind.LINEAR
    elif density.hs[0] == 0.0 and density.hs[-1] == 0.0:
        kind = BridgeKind.TRIANGLE
    else:
        kind = BridgeKind.EDGE_RAMPED
    return Bridge(fn, left, right, density, kind)


def hermite_bridge(left: EndpointData, right: EndpointData, max_halvings: int = MAX_HALVINGS) -> Bridge:
    """Convex C^2 function on ``[left.x, right.x]`` matching both endpoint jets.

    Raises Infeasible (with a reason) when no such function exists, and
    ShrinkExhausted when the ramp width underflows before the residual
    triangle becomes valid.
    """
    if not left.x < right.x:
        raise ValueError("need left.x < right.x")
    c = right.x - left.x
    feas = feasibility(c, left, right)
    if feas.variant == "infeasible":
        raise Infeasible(feas.reason)
    if feas.variant == "linear":
        density = zero_density(c)
    elif left.curvature == 0.0 and right.curvature == 0.0:
        density = triangle_bump(c, feas.P, feas.tau)
    else:
        w = 0.25 * c
        for _ in range(max_halvings + 1):
            try:
                density = edge_ramped_density(c, left.curvature, right.curvature, feas.P, feas.tau, w)
                break
            except ResidualInfeasible:
                w *= 0.5
        else:
            raise ShrinkExhausted(
                f"ramp width underflow on [{left.x!r}, {right.x!r}]; data at the feasibility boundary",
                location=left.x,
            )
    b = second_antiderivative(density, left, right_x=right.x)
    return Bridge(b.fn, left, right, density, b.kind)


# ---------------------------------------------------------------------------
# the averaging functional and its height certificate


def _sup_left_average_linear(h: PiecewiseFn) -> float:
    # Piecewise-linear h: on a piece at offset X with h = p0 + p1 t and prior
    # integral F0, the critical points of F(t) / (X + t) solve
    # t^2 + 2 X t + k = 0 with k = 2 (p0 X - F0) / p1.
    X = h.breakpoints[:-1] - h.breakpoints[0]
    w = h.widths
    p0 = np.array([c[0] for c in h.segments])
    p1 = np.array([c[1] if c.size > 1 else 0.0 for c in h.segments])
    inc = p0 * w + 0.5 * p1 * w * w
    F0 = np.concatenate(([0.0], np.cumsum(inc)[:-1]))
    best = max(float(p0[0]), float(np.max((F0 + inc) / (X + w))))
    curved = (p1 != 0.0) & (X > 0.0)
    if np.any(curved):
        Xc, p0c, p1c, F0c, wc = X[curved], p0[curved], p1[curved], F0[curved], w[curved]
        k = 2.0 * (p0c * Xc - F0c) / p1c
        disc = Xc * Xc - k
        ok = disc >= 0.0
        t = -k[ok] / (Xc[ok] + np.sqrt(disc[ok]))
        inside = (t > 0.0) & (t < wc[ok])
        if np.any(inside):
            t = t[inside]
            Fi = F0c[ok][inside] + p0c[ok][inside] * t + 0.5 * p1c[ok][inside] * t * t
            best = max(best, float(np.max(Fi / (Xc[ok][inside] + t))))
    return best


def _sup_left_average(h: PiecewiseFn) -> float:
    """``sup_{x in (0, c]} (1/x) int_0^x h``, including the ``x -> 0+`` limit."""
    if h.degree <= 1:
        return _sup_left_average_linear(h)
    a = h.domain[0]
    best = h.segments[0][0]
    F = 0.0
    for xj, w, p in zip(h.breakpoints[:-1], h.widths, h.segments):
        X = xj - a
        Pint = _poly.integ(p)
        # critical points of (F + Pint(t)) / (X + t): (X + t) p(t) - F - Pint(t) = 0
        num = _poly.sub(_poly.mul(np.array([X, 1.0]), p), _poly.add(Pint, [F]))
        cand = np.concatenate((_poly.real_roots(num, 0.0, w), [w]))
        cand = cand[X + cand > 0]
        if cand.size:
            best = max(best, float(np.max((F + _poly.peval(Pint, cand)) / (X + cand))))
        F += _poly.peval(Pint, w)
    return float(best)


def epsilon_bound(h, interval=None) -> float:
    """Largest one-sided average of ``h`` anchored at either end of its domain.

    ``max(sup_x (1/x) int_0^x h, sup_x (1/x) int_{c-x}^c h)`` over
    ``x in (0, c]``, with the limits ``h(0+)`` and ``h(c-)`` as candidates.
    ``h`` may be a PiecewiseFn or a BumpDensity; ``interval`` restricts it.
    """
    if isinstance(h, BumpDensity):
        h = h.as_piecewise()
    h = _fn(h)
    if interval is not None:
        h = h.restrict(*interval)
    scale = h.absmax()
    if h.minimum() < -1e-12 * max(scale, 1e-300):
        raise NegativeDensity(f"density takes the value {h.minimum()!r}")
    return max(_sup_left_average(h), _sup_left_average(h.reflect()))


def height_certificate(density: BumpDensity, eps: float, rtol: float = 1e-12) -> tuple[float, float]:
    """Check ``height <= 4 eps`` and return ``(height, 4 eps)``."""
    bound = 4.0 * eps
    if density.height > bound * (1.0 + rtol):
        raise CertificateViolated(f"bump height {density.height!r} exceeds 4*eps = {bound!r}")
    return density.height, bound


# ---------------------------------------------------------------------------
# gluing and the squeeze bound


def glue_bridge(f: ConvexFn, beta: float, gamma: float, eps: float) -> Bridge | None:
    """The bridge used by :func:`glue`, or None in the linear (equality) case."""
    alpha, delta = f.domain
    a, b = beta - eps, gamma + eps
    if not (alpha < a < b < delta):
        raise ValueError("need alpha < beta - eps < gamma + eps < delta")
    for x, r in zip(f.interior_breakpoints, f.regularity):
        if r is not Regularity.C2 and (alpha < x < beta or gamma < x < delta):
            raise NotC2OnFlanks(f"{r.value} breakpoint at {float(x)!r} inside a flank")
    gap = tangent_gap(f, a, b)
    fa, fb, sa = f.eval(a), f.eval(b), f.eval(a, 1)
    tol = FEAS_RTOL * max(abs(fa), abs(fb), abs(sa) * (b - a), 1e-300)
    if gap < -tol:
        raise TangentGapNegative(f"f({b!r}) lies {-gap:.3e} below the tangent at {a!r}")
    if gap <= tol:
        k = f.fn.restrict(a, b).absmax(2)
        if k > f.tol_conv:
            raise GlueInfeasible(f"zero tangent gap on [{a!r}, {b!r}] but f is not linear there")
        return None
    try:
        return hermite_bridge(endpoint_data(f, a), endpoint_data(f, b))
    except (Infeasible, ShrinkExhausted) as exc:
        raise GlueInfeasible(str(exc)) from exc


def glue(f: ConvexFn, beta: float, gamma: float, eps: float) -> ConvexFn:
    """Convex C^2 function equal to ``f`` on ``[alpha, beta-eps] U [gamma+eps, delta]``.

    ``f`` must be C^2 on ``[alpha, beta]`` and ``[gamma, delta]``.  If ``f(gamma+eps)``
    lies strictly above the tangent at ``beta-eps`` the middle is replaced by a
    Hermite bridge; on equality ``f`` is linear there and is returned as is.
    """
    bridge = glue_bridge(f, beta, gamma, eps)
    if bridge is None:
        return f
    a, b = bridge.fn.domain
    return check_convex(splice(f.fn, a, b, bridge.fn), tol_cont=f.tol_cont)


def squeeze_check(f, g, alpha: float, beta: float, gamma: float, rtol: float = 1e-9) -> tuple[float, float]:
    """``(sup_[alpha,gamma] |f - g|, 2 L (gamma - alpha))`` for convex ``f, g``
    agreeing at ``alpha < beta < gamma``; raises if the bound fails."""
    if not alpha < beta < gamma:
        raise ValueError("need alpha < beta < gamma")
    f, g = _fn(f), _fn(g)
    L = lipschitz_const(f, (alpha, gamma))
    for x in (alpha, beta, gamma):
        fx, gx = f.eval(x), g.eval(x)
        if abs(fx - gx) > rtol * max(abs(fx), L * (gamma - alpha), 1e-300):
            raise AgreementPreconditionFailed(f"f({x!r}) = {fx!r} but g({x!r}) = {gx!r}")
    sup = sup_abs_diff(f, g, (alpha, gamma))
    bound = 2.0 * L * (gamma - alpha)
    if sup > bound * (1.0 + 1e-12):
        raise CertificateViolated(f"sup |f - g| = {sup!r} exceeds 2L(gamma - alpha) = {bound!r}")
    return sup, bound
