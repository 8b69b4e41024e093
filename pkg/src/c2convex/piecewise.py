"""Piecewise polynomials on a bounded interval.

Each segment stores its coefficients in the local coordinate
``x - segment_left`` (ascending degree).  Evaluation at an interior
breakpoint uses the right segment; the domain's right endpoint uses the
last segment.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import _poly
from .errors import DomainMismatch, NotContinuous, NotConvex, OutOfDomain

MAX_DEGREE = 6
TOL_CONT = 1e-9
TOL_CONV = 1e-10


class PiecewiseFn:
    """A piecewise polynomial ``x_0 < x_1 < ... < x_m`` with ``m`` segments.

    Segment ``j`` holds ascending coefficients in the local variable
    ``x - x_j``.  Trailing zero coefficients are trimmed; ``normalize=True``
    additionally zeroes terms negligible on the segment (value-relative, so it
    can discard derivative information on very narrow segments).
    """

    __slots__ = ("breakpoints", "segments", "_mat")

    def __init__(self, breakpoints, segments, normalize: bool = False):
        bp = np.array(breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if not np.all(np.isfinite(bp)):
            raise ValueError("breakpoints must be finite")
        if not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if len(segments) != bp.size - 1:
            raise ValueError(
                f"{len(segments)} segments for {bp.size} breakpoints; expected {bp.size - 1}"
            )
        widths = np.diff(bp)
        segs = []
        for c, w in zip(segments, widths):
            c = _poly.normalize(c, w) if normalize else _poly.trim(_poly.as_coeffs(c))
            if not np.all(np.isfinite(c)):
                raise ValueError("coefficients must be finite")
            if c.size - 1 > MAX_DEGREE:
                raise ValueError(f"segment degree {c.size - 1} exceeds {MAX_DEGREE}")
            c.setflags(write=False)
            segs.append(c)
        bp.setflags(write=False)
        self.breakpoints = bp
        self.segments = tuple(segs)
        self._mat = None

    # construction helpers

    @classmethod
    def from_global(cls, breakpoints, polys):
        """Build from polynomials given in the global coordinate ``x``."""
        bp = np.asarray(breakpoints, dtype=float)
        return cls(bp, [_poly.shift(_poly.as_coeffs(p), x0) for p, x0 in zip(polys, bp[:-1])])

    @classmethod
    def constant(cls, domain, value: float):
        return cls(list(domain), [[float(value)]])

    @classmethod
    def linear_interpolant(cls, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        slopes = np.diff(ys) / np.diff(xs)
        return cls(xs, [[y, s] for y, s in zip(ys[:-1], slopes)])

    # basic queries

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def degree(self) -> int:
        return max(c.size - 1 for c in self.segments)

    def segment_index(self, x: float, side: str = "right") -> int:
        a, b = self.domain
        if not a <= x <= b:
            raise OutOfDomain(f"x={x!r} outside domain [{a!r}, {b!r}]")
        if side == "right":
            j = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        else:
            j = int(np.searchsorted(self.breakpoints, x, side="left")) - 1
        return min(max(j, 0), self.n_segments - 1)

    def eval(self, x: float, order: int = 0, side: str = "right") -> float:
        """Value or derivative at ``x``; ``side="left"`` takes left limits."""
        j = self.segment_index(x, side)
        c = _poly.deriv(self.segments[j], order) if order else self.segments[j]
        return _poly.peval(c, x - self.breakpoints[j])

    def _matrix(self) -> np.ndarray:
        if self._mat is None:
            n = max(c.size for c in self.segments)
            mat = np.zeros((self.n_segments, n))
            for j, c in enumerate(self.segments):
                mat[j, : c.size] = c
            self._mat = mat
        return self._mat

    def __call__(self, x, order: int = 0):
        """Vectorized evaluation (right-segment convention)."""
        if np.ndim(x) == 0:
            return self.eval(float(x), order)
        x = np.asarray(x, dtype=float)
        a, b = self.domain
        if np.any((x < a) | (x > b)):
            raise OutOfDomain("points outside domain")
        j = np.clip(np.searchsorted(self.breakpoints, x, side="right") - 1, 0, self.n_segments - 1)
        t = x - self.breakpoints[j]
        mat = self._matrix()
        for _ in range(order):
            if mat.shape[1] <= 1:
                return np.zeros_like(x)
            mat = mat[:, 1:] * np.arange(1, mat.shape[1])
        acc = np.zeros_like(x)
        for k in range(mat.shape[1] - 1, -1, -1):
            acc = acc * t + mat[j, k]
        return acc

    # calculus

    def derivative(self, order: int = 1) -> "PiecewiseFn":
        return PiecewiseFn(self.breakpoints, [_poly.deriv(c, order) for c in self.segments])

    def restrict(self, lo: float, hi: float) -> "PiecewiseFn":
        a, b = self.domain
        if not (a <= lo < hi <= b):
            raise OutOfDomain(f"[{lo!r}, {hi!r}] not inside [{a!r}, {b!r}]")
        bp = self.breakpoints
        inner = bp[(bp > lo) & (bp < hi)]
        new_bp = np.concatenate(([lo], inner, [hi]))
        segs = []
        for left in new_bp[:-1]:
            j = self.segment_index(left, "right")
            segs.append(_poly.shift(self.segments[j], left - bp[j]))
        return PiecewiseFn(new_bp, segs)

    def reflect(self) -> "PiecewiseFn":
        """The function ``x -> f(a + b - x)`` on the same domain."""
        a, b = self.domain
        bp = (a + b) - self.breakpoints[::-1]
        bp[0], bp[-1] = a, b
        segs = [_poly.reflect(c, w) for c, w in zip(self.segments[::-1], self.widths[::-1])]
        return PiecewiseFn(bp, segs)

    def continuity_residuals(self) -> np.ndarray:
        """``|left - right|`` limits of value, slope, curvature at interior knots.

        Shape ``(m - 1, 3)``.
        """
        out = np.zeros((self.n_segments - 1, 3))
        for j in range(self.n_segments - 1):
            left, right = self.segments[j], self.segments[j + 1]
            w = self.widths[j]
            for k in range(3):
                lv = _poly.peval(_poly.deriv(left, k), w)
                rv = _poly.deriv(right, k)[0]
                out[j, k] = abs(lv - rv)
        return out

    def minimum(self, lo: float | None = None, hi: float | None = None) -> float:
        g = self if lo is None and hi is None else self.restrict(*_bounds(self, lo, hi))
        return min(_poly.min_on(c, w) for c, w in zip(g.segments, g.widths))

    def maximum(self, lo: float | None = None, hi: float | None = None) -> float:
        g = self if lo is None and hi is None else self.restrict(*_bounds(self, lo, hi))
        return max(_poly.max_on(c, w) for c, w in zip(g.segments, g.widths))

    def absmax(self, order: int = 0) -> float:
        return max(
            _poly.absmax_on(_poly.deriv(c, order), w) for c, w in zip(self.segments, self.widths)
        )

    # serialization

    def to_dict(self) -> dict:
        return {
            "domain": list(self.domain),
            "breakpoints": self.breakpoints.tolist(),
            "segments": [{"coeffs": c.tolist()} for c in self.segments],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseFn":
        try:
            bp = [float(x) for x in d["breakpoints"]]
            segs = [[float(c) for c in s["coeffs"]] for s in d["segments"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed function JSON: {exc}") from exc
        if "domain" in d:
            dom = [float(x) for x in d["domain"]]
            if len(dom) != 2 or dom[0] != bp[0] or dom[1] != bp[-1]:
                raise ValueError("domain does not match first/last breakpoint")
        return cls(bp, segs)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseFn":
        return cls.from_dict(json.loads(text))

    def same_as(self, other: "PiecewiseFn") -> bool:
        """Bitwise equality of breakpoints and coefficients."""
        return (
            np.array_equal(self.breakpoints, other.breakpoints)
            and len(self.segments) == len(other.segments)
            and all(np.array_equal(p, q) for p, q in zip(self.segments, other.segments))
        )

    def __repr__(self):
        a, b = self.domain
        return f"PiecewiseFn([{a:g}, {b:g}], {self.n_segments} segments, degree {self.degree})"


def _bounds(f: PiecewiseFn, lo, hi):
    a, b = f.domain
    return (a if lo is None else lo), (b if hi is None else hi)


def eval(f, x: float, order: int = 0) -> float:  # noqa: A001
    """``f(x)``, ``f'(x)`` or ``f''(x)`` with the right-segment convention."""
    return _fn(f).eval(x, order)


def _fn(f) -> PiecewiseFn:
    return f.fn if isinstance(f, ConvexFn) else f


# ---------------------------------------------------------------------------
# scales and certification


@dataclass(frozen=True)
class Scales:
    value: float
    slope: float
    curvature: float
    length: float


def scales(f) -> Scales:
    """Magnitudes of ``f``, ``f'``, ``f''`` on the domain, with fallbacks.

    A zero derivative scale is replaced by one derived from the next lower
    order and the domain length so relative tolerances never collapse to 0.
    """
    if isinstance(f, ConvexFn):
        return f.scales
    a, b = f.domain
    length = b - a
    v = f.absmax(0)
    s = f.absmax(1)
    k = f.absmax(2)
    if v == 0.0:
        v = s * length if s > 0 else (k * length**2 if k > 0 else 1.0)
    if s == 0.0:
        s = v / length
    if k == 0.0:
        k = s / length
    return Scales(v, s, k, length)


class Regularity(str, enum.Enum):
    C0_KINK = "C0_kink"
    C1_ONLY = "C1_only"
    C2 = "C2"


@dataclass(frozen=True)
class ConvexFn:
    """A piecewise polynomial certified convex by :func:`check_convex`."""

    fn: PiecewiseFn
    regularity: tuple
    scales: Scales
    tol_conv: float
    tol_cont: float
    lipschitz_cache: tuple = field(default=(), repr=False)

    @property
    def domain(self):
        return self.fn.domain

    @property
    def breakpoints(self):
        return self.fn.breakpoints

    @property
    def interior_breakpoints(self) -> np.ndarray:
        return self.fn.breakpoints[1:-1]

    def eval(self, x, order=0, side="right"):
        return self.fn.eval(x, order, side)

    def __call__(self, x, order=0):
        return self.fn(x, order)

    def breakpoints_of(self, *kinds: Regularity) -> list[float]:
        return [float(x) for x, r in zip(self.interior_breakpoints, self.regularity) if r in kinds]

    @property
    def is_c2(self) -> bool:
        return all(r is Regularity.C2 for r in self.regularity)


def check_convex(f: PiecewiseFn, tol_conv: float | None = None, tol_cont: float = TOL_CONT) -> ConvexFn:
    """Certify convexity of ``f`` and classify each interior breakpoint.

    ``tol_conv`` is absolute (default ``1e-10`` times the curvature scale);
    ``tol_cont`` is relative to the value, slope and curvature scales and is
    also the threshold separating a genuine jump from round-off.
    """
    f = _fn(f)
    sc = scales(f)
    if tol_conv is None:
        tol_conv = TOL_CONV * sc.curvature
    res = f.continuity_residuals()
    regs = []
    for j in range(f.n_segments - 1):
        x = float(f.breakpoints[j + 1])
        if res[j, 0] > tol_cont * sc.value:
            raise NotContinuous(
                f"value jump {res[j, 0]:.3e} at breakpoint {x!r}", location=x, value=res[j, 0]
            )
        w = f.widths[j]
        jump = _poly.deriv(f.segments[j + 1])[0] - _poly.peval(_poly.deriv(f.segments[j]), w)
        if jump < -tol_cont * sc.slope:
            raise NotConvex(
                f"slope decreases by {-jump:.6g} at breakpoint {x!r}", location=x, value=jump
            )
        if jump > tol_cont * sc.slope:
            regs.append(Regularity.C0_KINK)
        elif res[j, 2] > tol_cont * sc.curvature:
            regs.append(Regularity.C1_ONLY)
        else:
            regs.append(Regularity.C2)
    slopes = []
    for j, (c, w) in enumerate(zip(f.segments, f.widths)):
        d2 = _poly.deriv(c, 2)
        lo = _poly.min_on(d2, w)
        if lo < -tol_conv:
            x0, x1 = f.breakpoints[j], f.breakpoints[j + 1]
            raise NotConvex(
                f"second derivative {lo:.6g} < 0 on segment [{x0!r}, {x1!r}]",
                location=(float(x0), float(x1)),
                value=lo,
            )
        d1 = _poly.deriv(c)
        slopes.append((float(d1[0]), _poly.peval(d1, w)))
    return ConvexFn(f, tuple(regs), sc, float(tol_conv), float(tol_cont), tuple(slopes))


# ---------------------------------------------------------------------------
# comparisons of two functions


def refine(f: PiecewiseFn, g: PiecewiseFn, lo: float, hi: float):
    """Common refinement of ``f`` and ``g`` on ``[lo, hi]``.

    Yields ``(left, width, pf, pg)`` with both polynomials re-expanded about
    ``left``.
    """
    cuts = np.concatenate(([lo, hi], f.breakpoints, g.breakpoints))
    cuts = np.unique(cuts[(cuts >= lo) & (cuts <= hi)])
    for p, q in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (p + q)
        jf = f.segment_index(mid)
        jg = g.segment_index(mid)
        pf = _poly.shift(f.segments[jf], p - f.breakpoints[jf])
        pg = _poly.shift(g.segments[jg], p - g.breakpoints[jg])
        yield float(p), float(q - p), pf, pg


def _common_interval(f, g, interval):
    fa, fb = f.domain
    ga, gb = g.domain
    if interval is None:
        if (fa, fb) != (ga, gb):
            raise DomainMismatch(f"domains differ: {f.domain} vs {g.domain}")
        return fa, fb
    lo, hi = interval
    if lo < max(fa, ga) or hi > min(fb, gb) or not lo < hi:
        raise DomainMismatch(f"interval {interval} not inside both domains")
    return float(lo), float(hi)


def sup_abs_diff(f, g, interval=None) -> float:
    """Exact ``sup |f - g|`` over ``interval`` (default: the common domain)."""
    f, g = _fn(f), _fn(g)
    lo, hi = _common_interval(f, g, interval)
    best = 0.0
    for _, w, pf, pg in refine(f, g, lo, hi):
        best = max(best, _poly.absmax_on(_poly.sub(pf, pg), w))
    return best


def _term_scale(f: PiecewiseFn) -> float:
    return max(_poly.term_scale(c, w) for c, w in zip(f.segments, f.widths))


def disagreement_measure(f, g, rtol: float = _poly.NORM_RTOL) -> float:
    """Lebesgue measure of ``{f != g}``.

    A refined piece counts as agreeing when every term of ``f - g`` there is
    below ``rtol`` times the larger coefficient-term scale of ``f`` and ``g``.
    """
    f, g = _fn(f), _fn(g)
    lo, hi = _common_interval(f, g, None)
    scale = max(_term_scale(f), _term_scale(g))
    total = 0.0
    for _, w, pf, pg in refine(f, g, lo, hi):
        if not _poly.is_zero(_poly.sub(pf, pg), w, scale, rtol):
            total += w
    return total


def differing_pieces(f, g, rtol: float = _poly.NORM_RTOL) -> list[tuple[float, float]]:
    """Maximal intervals on which ``f`` and ``g`` differ."""
    f, g = _fn(f), _fn(g)
    lo, hi = _common_interval(f, g, None)
    scale = max(_term_scale(f), _term_scale(g))
    out: list[list[float]] = []
    for p, w, pf, pg in refine(f, g, lo, hi):
        if _poly.is_zero(_poly.sub(pf, pg), w, scale, rtol):
            continue
        if out and out[-1][1] == p:
            out[-1][1] = p + w
        else:
            out.append([p, p + w])
    return [(a, b) for a, b in out]


def lipschitz_const(f, interval=None) -> float:
    """``max(|f'(lo+)|, |f'(hi-)|)``, the Lipschitz constant of a convex ``f``."""
    f = _fn(f)
    lo, hi = f.domain if interval is None else interval
    a, b = f.domain
    if not (a <= lo < hi <= b):
        raise OutOfDomain(f"[{lo!r}, {hi!r}] not inside [{a!r}, {b!r}]")
    return max(abs(f.eval(lo, 1, "right")), abs(f.eval(hi, 1, "left")))


def tangent_gap(f, x0: float, x1: float) -> float:
    """Height of ``f(x1)`` above the tangent line at ``x0`` (right slope)."""
    f = _fn(f)
    if not x0 < x1:
        raise ValueError("need x0 < x1")
    return f.eval(x1) - f.eval(x0) - f.eval(x0, 1, "right") * (x1 - x0)


def splice(base: PiecewiseFn, lo: float, hi: float, piece: PiecewiseFn) -> PiecewiseFn:
    """Replace ``base`` on ``[lo, hi]`` by ``piece`` (whose domain is ``[lo, hi]``)."""
    base, piece = _fn(base), _fn(piece)
    a, b = base.domain
    if not (a <= lo < hi <= b):
        raise OutOfDomain(f"[{lo!r}, {hi!r}] not inside [{a!r}, {b!r}]")
    if piece.domain != (lo, hi):
        raise DomainMismatch(f"piece domain {piece.domain} != {(lo, hi)}")
    bp = base.breakpoints
    new_bp: list[float] = []
    segs: list[np.ndarray] = []
    for j in range(base.n_segments):
        if bp[j] < lo:
            new_bp.append(float(bp[j]))
            segs.append(base.segments[j])
    new_bp.extend(piece.breakpoints[:-1].tolist())
    segs.extend(piece.segments)
    if hi < b:
        j = base.segment_index(hi, "right")
        new_bp.append(hi)
        segs.append(_poly.shift(base.segments[j], hi - bp[j]))
        for k in range(j + 1, base.n_segments):
            new_bp.append(float(bp[k]))
            segs.append(base.segments[k])
    new_bp.append(b)
    return PiecewiseFn(new_bp, segs)


def concatenate(parts) -> PiecewiseFn:
    """Join functions on abutting domains into one."""
    bp: list[float] = []
    segs: list[np.ndarray] = []
    for p in parts:
        p = _fn(p)
        if bp and bp[-1] != p.domain[0]:
            raise DomainMismatch("parts do not abut")
        bp = bp[:-1] + p.breakpoints.tolist()
        segs.extend(p.segments)
    return PiecewiseFn(bp, segs)
