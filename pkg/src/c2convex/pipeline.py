"""End-to-end convex C^2 Lusin approximation of a convex piecewise polynomial.

1. Round slope kinks (half of the measure budget).
2. Around every remaining curvature jump, open a small interval whose
   endpoints are C^2 points, and replace the function there by a Hermite
   bridge matching value, slope and curvature at both ends.
3. Shrink each interval until the exact sup error beats the error profile.
4. Assemble and verify.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _poly
from .bridge import (
    Bridge,
    BridgeKind,
    endpoint_data,
    epsilon_bound,
    glue_bridge,
    height_certificate,
    hermite_bridge,
)
from .errors import (
    C2ResidualExceeded,
    GlueInfeasible,
    Infeasible,
    MeasureExceeded,
    NotConvex,
    NotConvexOutput,
    ProfileExceeded,
    ShrinkExhausted,
)
from .piecewise import (
    TOL_CONT,
    TOL_CONV,
    ConvexFn,
    PiecewiseFn,
    Regularity,
    _fn,
    check_convex,
    concatenate,
    disagreement_measure,
    lipschitz_const,
    scales,
    sup_abs_diff,
)
from .regularize import GAP_FRACTION, KinkRecord, round_kinks



@dataclass(frozen=True)
class ToleranceConfig:
    """Measure budget, pointwise error profile and numerical tolerances.

    ``error_profile`` is a positive PiecewiseFn covering the domain or a
    positive constant.  ``tol_cont`` and ``tol_conv`` are relative to the
    input's value/slope/curvature scales.
    """

    measure_budget: float
    error_profile: PiecewiseFn | float
    tol_cont: float = TOL_CONT
    tol_conv: float = TOL_CONV
    shrink_factor: float = 0.5
    max_shrink: int = 60

    def __post_init__(self):
        if not self.measure_budget > 0:
            raise ValueError("measure_budget must be positive")
        if not 0.0 < self.shrink_factor < 1.0:
            raise ValueError("shrink_factor must lie in (0, 1)")
        if not isinstance(self.error_profile, PiecewiseFn) and not float(self.error_profile) > 0:
            raise ValueError("constant error profile must be positive")

    def profile(self, domain) -> PiecewiseFn:
        if isinstance(self.error_profile, PiecewiseFn):
            a, b = self.error_profile.domain
            if a > domain[0] or b < domain[1]:
                raise ValueError(f"error profile domain {(a, b)} does not cover {domain}")
            prof = self.error_profile
            if (a, b) != tuple(domain):
                prof = prof.restrict(*domain)
        else:
            prof = PiecewiseFn.constant(domain, float(self.error_profile))
        if not prof.minimum() > 0:
            raise ValueError("error profile must be positive on the domain")
        return prof


@dataclass(frozen=True)
class CorrectionInterval:
    center: float
    a: float
    b: float
    bridge: Bridge
    sup_error: float
    shrink_count: int
    eps: float
    certificate: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "center": self.center,
            "a": self.a,
            "b": self.b,
            "kind": self.bridge.kind.value,
            "H": self.bridge.density.height,
            "eps": self.eps,
            "sup_err": self.sup_error,
            "shrinks": self.shrink_count,
        }


@dataclass
class ApproxReport:
    disagreement: float
    sup_error_global: float
    min_curvature: float
    residuals: dict
    intervals: list = field(default_factory=list)
    kinks: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "disagreement": self.disagreement,
            "sup_error": self.sup_error_global,
            "min_curvature": self.min_curvature,
            "residuals": dict(self.residuals),
            "intervals": [iv.to_dict() for iv in self.intervals],
            "kinks": [k.to_dict() for k in self.kinks],
            "certificates": [list(c) for c in self.certificates],
        }


def _as_convex(f) -> ConvexFn:
    return f if isinstance(f, ConvexFn) else check_convex(f)


def _bridge_interval(f_orig: PiecewiseFn, w: ConvexFn, x: float, r: float, profile, cfg) -> CorrectionInterval:
    """Bridge ``w`` around ``x`` with half-width ``r``, shrinking until within profile."""
    last = None
    for n in range(cfg.max_shrink + 1):
        a, b = x - r, x + r
        if not a < x < b:
            last = "interval collapsed below floating-point resolution"
            break
        eps_min = profile.minimum(a, b)
        try:
            bridge = hermite_bridge(endpoint_data(w, a), endpoint_data(w, b))
        except (Infeasible, ShrinkExhausted) as exc:
            last = exc
            r *= cfg.shrink_factor
            continue
        sup = sup_abs_diff(f_orig, bridge.fn, (a, b))
        if sup < eps_min:
            src = w.fn.restrict(a, b).derivative(2)
            eps = epsilon_bound(src)
            cert = None
            if bridge.kind is BridgeKind.TRIANGLE:
                cert = height_certificate(bridge.density, eps)
            return CorrectionInterval(x, a, b, bridge, sup, n, eps, cert)
        last = f"sup error {sup:.3e} >= profile {eps_min:.3e}"
        r *= cfg.shrink_factor
    raise ShrinkExhausted(
        f"breakpoint {x!r}: no admissible correction interval after {n} shrinks ({last})",
        location=x,
    )


def _initial_radius(w: ConvexFn, i: int, cap: float, profile) -> float:
    bp = w.breakpoints
    x = bp[i]
    r = min(cap, GAP_FRACTION * min(x - bp[i - 1], bp[i + 1] - x))
    L = lipschitz_const(w, (x - r, x + r))
    if L > 0:
        r = min(r, profile.minimum(x - r, x + r) / (8.0 * L))
    return float(r)


def _bridge_all(f_orig: PiecewiseFn, w: ConvexFn, profile: PiecewiseFn, budget: float, cfg):
    """Replace ``w`` near each non-C^2 interior breakpoint; total span <= budget / 2."""
    bad = [j + 1 for j, r in enumerate(w.regularity) if r is not Regularity.C2]
    if not bad:
        return w.fn, []
    cap = budget / (4 * len(bad))
    intervals = []
    for i in bad:
        r = _initial_radius(w, i, cap, profile)
        intervals.append(_bridge_interval(f_orig, w, float(w.breakpoints[i]), r, profile, cfg))
    parts = []
    prev = w.domain[0]
    for iv in intervals:
        if iv.a > prev:
            parts.append(w.fn.restrict(prev, iv.a))
        parts.append(iv.bridge.fn)
        prev = iv.b
    if prev < w.domain[1]:
        parts.append(w.fn.restrict(prev, w.domain[1]))
    return concatenate(parts), intervals


def approximate(f, cfg: ToleranceConfig) -> tuple[ConvexFn, ApproxReport]:
    """Convex C^2 ``g`` with ``|{f != g}| < measure_budget`` and ``|f - g| <= profile``."""
    f = _as_convex(f)
    profile = cfg.profile(f.domain)
    working, kinks = round_kinks(f, 0.5 * cfg.measure_budget, error_profile=profile)
    g_fn, intervals = _bridge_all(f.fn, working, profile, cfg.measure_budget, cfg)
    g = _certify_output(g_fn, f)
    report = verify(f, g, cfg, intervals=intervals, kinks=kinks)
    return g, report


def _certify_output(g_fn: PiecewiseFn, f: ConvexFn) -> ConvexFn:
    try:
        return check_convex(g_fn, tol_conv=f.tol_conv, tol_cont=f.tol_cont)
    except NotConvex as exc:
        raise NotConvexOutput(f"assembled output is not convex: {exc}") from exc


def _cells(domain, cells) -> np.ndarray:
    a, b = domain
    if np.isscalar(cells):
        n = int(cells)
        if n < 1:
            raise ValueError("cells must be >= 1")
        alphas = np.linspace(a, b, n + 1)
        alphas[0], alphas[-1] = a, b
        return alphas
    alphas = np.asarray(cells, dtype=float)
    if alphas.size < 2 or alphas[0] != a or alphas[-1] != b or not np.all(np.diff(alphas) > 0):
        raise ValueError("cell boundaries must increase from the domain's left to right end")
    return alphas


def graded_budget(f: ConvexFn, profile: PiecewiseFn, alphas: np.ndarray, i: int) -> float:
    """Per-cell cap ``min(inf eps / (4 L_i), neighbour cell lengths)`` for cell ``i``.

    ``L_i`` and the infimum are taken over the cell and its two neighbours.
    """
    n = alphas.size - 1
    lo, hi = alphas[max(i - 1, 0)], alphas[min(i + 2, n)]
    terms = []
    L = lipschitz_const(f, (lo, hi))
    if L > 0:
        terms.append(profile.minimum(lo, hi) / (4.0 * L))
    if i >= 1:
        terms.append(alphas[i] - alphas[i - 1])
    if i + 2 <= n:
        terms.append(alphas[i + 2] - alphas[i + 1])
    return min(terms) if terms else float("inf")


def _seam_jump(G: PiecewiseFn, x: float, f: ConvexFn) -> bool:
    j = int(np.searchsorted(G.breakpoints, x)) - 1
    left, right, w = G.segments[j], G.segments[j + 1], G.widths[j]
    sc = f.scales
    d1 = abs(_poly.deriv(right)[0] - _poly.peval(_poly.deriv(left), w))
    d2 = abs(_poly.deriv(right, 2)[0] - _poly.peval(_poly.deriv(left, 2), w))
    return d1 > f.tol_cont * sc.slope or d2 > f.tol_cont * sc.curvature


def _glue_seam(f_orig: PiecewiseFn, G: PiecewiseFn, x: float, cap: float, profile, cfg):
    bp = G.breakpoints
    i = int(np.searchsorted(bp, x))
    gl, gr = x - bp[i - 1], bp[i + 1] - x
    local = check_convex(G.restrict(x - gl, x + gr))
    r = min(cap, GAP_FRACTION * min(gl, gr))
    L = lipschitz_const(local, (x - r, x + r))
    if L > 0:
        r = min(r, profile.minimum(x - r, x + r) / (8.0 * L))
    feasible_seen = False
    for n in range(cfg.max_shrink + 1):
        try:
            bridge = glue_bridge(local, x - r / 2, x + r / 2, r / 2)
        except GlueInfeasible:
            r *= cfg.shrink_factor
            continue
        feasible_seen = True
        if bridge is None:
            return None
        a, b = bridge.fn.domain
        sup = sup_abs_diff(f_orig, bridge.fn, (a, b))
        if sup < profile.minimum(a, b):
            eps = epsilon_bound(G.restrict(a, b).derivative(2))
            return CorrectionInterval(x, a, b, bridge, sup, n, eps)
        r *= cfg.shrink_factor
    if not feasible_seen:
        raise GlueInfeasible(f"seam at {x!r}: no feasible glue bridge")
    raise ShrinkExhausted(f"seam at {x!r}: glue bridge never met the error profile", location=x)


def approximate_graded(f, cfg: ToleranceConfig, cells=1) -> tuple[ConvexFn, ApproxReport]:
    """Cell-wise approximation fused by gluing at the cell boundaries.

    ``cells`` is a count (uniform cells) or the full list of boundaries.
    Kinks are rounded globally first; each cell then gets the smaller of an
    equal share of a quarter of the budget and its graded cap; seams that are
    not C^2 are glued within the last quarter.
    """
    f = _as_convex(f)
    profile = cfg.profile(f.domain)
    alphas = _cells(f.domain, cells)
    n = alphas.size - 1
    budget = cfg.measure_budget
    working, kinks = round_kinks(f, 0.5 * budget, error_profile=profile)
    parts, intervals = [], []
    for i in range(n):
        lo, hi = float(alphas[i]), float(alphas[i + 1])
        cell_budget = min(budget / (4 * n), graded_budget(f, profile, alphas, i))
        w_cell = check_convex(working.fn.restrict(lo, hi), tol_cont=f.tol_cont)
        g_cell, ivs = _bridge_all(f.fn.restrict(lo, hi), w_cell, profile, cell_budget, cfg)
        parts.append(g_cell)
        intervals.extend(ivs)
    G = concatenate(parts)
    seam_cap = budget / (8 * max(n - 1, 1))
    for x in alphas[1:-1]:
        x = float(x)
        if not _seam_jump(G, x, f):
            continue
        iv = _glue_seam(f.fn, G, x, seam_cap, profile, cfg)
        if iv is None:
            continue
        G = concatenate([G.restrict(G.domain[0], iv.a), iv.bridge.fn, G.restrict(iv.b, G.domain[1])])
        intervals.append(iv)
    intervals.sort(key=lambda iv: iv.a)
    g = _certify_output(G, f)
    report = verify(f, g, cfg, intervals=intervals, kinks=kinks)
    return g, report


def _refine3(f: PiecewiseFn, g: PiecewiseFn, e: PiecewiseFn):
    lo, hi = f.domain
    cuts = np.unique(np.concatenate((f.breakpoints, g.breakpoints, e.breakpoints)))
    cuts = cuts[(cuts >= lo) & (cuts <= hi)]
    for p, q in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (p + q)
        polys = []
        for h in (f, g, e):
            j = h.segment_index(mid)
            polys.append(_poly.shift(h.segments[j], p - h.breakpoints[j]))
        yield float(q - p), polys


def profile_violation(f, g, profile: PiecewiseFn) -> float:
    """``max_x (|f(x) - g(x)| - profile(x))``, exact per refined segment."""
    f, g = _fn(f), _fn(g)
    worst = -np.inf
    for w, (pf, pg, pe) in _refine3(f, g, profile):
        d = _poly.sub(pf, pg)
        worst = max(worst, _poly.max_on(_poly.sub(d, pe), w), _poly.max_on(_poly.sub(-d, pe), w))
    return float(worst)


def verify(f, g, cfg: ToleranceConfig | None = None, intervals=(), kinks=()) -> ApproxReport:
    """Check the output contracts of ``g`` against ``f``.

    In order: convexity of ``g``, C^2 continuity at every knot, and with a
    config, the measure budget and the pointwise error profile.  Raises the
    matching ContractViolation (carrying the report) on the first failure.
    """
    f, g = _fn(f), _fn(g)
    sc = scales(f)
    tol_cont = TOL_CONT if cfg is None else cfg.tol_cont
    tol_conv = TOL_CONV if cfg is None else cfg.tol_conv
    min_curv = min(_poly.min_on(_poly.deriv(c, 2), w) for c, w in zip(g.segments, g.widths))
    res = g.continuity_residuals()
    rmax = res.max(axis=0) if res.size else np.zeros(3)
    report = ApproxReport(
        disagreement=disagreement_measure(f, g),
        sup_error_global=sup_abs_diff(f, g),
        min_curvature=float(min_curv),
        residuals={"c0": float(rmax[0]), "c1": float(rmax[1]), "c2": float(rmax[2])},
        intervals=list(intervals),
        kinks=list(kinks),
        certificates=[iv.certificate for iv in intervals if iv.certificate is not None],
    )
    if min_curv < -tol_conv * sc.curvature:
        raise NotConvexOutput(f"g'' reaches {min_curv:.6g}", report)
    limits = (sc.value, sc.slope, sc.curvature)
    for k, name in enumerate(("c0", "c1", "c2")):
        if rmax[k] > tol_cont * limits[k]:
            knot = float(g.breakpoints[1 + int(np.argmax(res[:, k]))])
            raise C2ResidualExceeded(f"{name} residual {rmax[k]:.3e} at knot {knot!r}", report)
    if cfg is not None:
        if not report.disagreement < cfg.measure_budget:
            raise MeasureExceeded(
                f"disagreement {report.disagreement!r} >= budget {cfg.measure_budget!r}", report
            )
        if not isinstance(cfg.error_profile, PiecewiseFn) and cfg.error_profile == float("inf"):
            return report
        viol = profile_violation(f, g, cfg.profile(f.domain))
        if viol > 0:
            raise ProfileExceeded(f"|f - g| exceeds the profile by {viol:.3e}", report)
    return report
