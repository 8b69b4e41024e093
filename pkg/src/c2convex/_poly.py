"""Dense polynomial helpers on ascending coefficient arrays.

All polynomials live in a local coordinate ``t`` (for segments of a
piecewise function, ``t = x - segment_left``), coefficients ascending.
"""

from __future__ import annotations

import numpy as np

NORM_RTOL = 1e-14
ROOT_TOL = 1e-12


def as_coeffs(c) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=float)).copy()
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficients must be a non-empty 1-D sequence")
    return a


def trim(c: np.ndarray) -> np.ndarray:
    n = c.size
    while n > 1 and c[n - 1] == 0.0:
        n -= 1
    return c[:n] if n > 1 or c[0] != 0.0 else np.zeros(1)


def normalize(c, width: float | None = None, rtol: float = NORM_RTOL) -> np.ndarray:
    """Zero negligible coefficients and drop trailing zeros.

    With ``width`` given the comparison uses ``|c_k| * width**k``, i.e. each
    term's size on the segment, so narrow segments keep their high-order terms.
    """
    c = as_coeffs(c)
    if width is None:
        mag = np.abs(c)
    else:
        mag = np.abs(c) * float(width) ** np.arange(c.size)
    top = mag.max()
    if top == 0.0 or not np.isfinite(top):
        return trim(c)
    c[mag < rtol * top] = 0.0
    return trim(c)


def degree(c: np.ndarray) -> int:
    return trim(np.asarray(c, dtype=float)).size - 1


def peval(c: np.ndarray, t):
    """Horner evaluation, scalar or array ``t``."""
    if np.ndim(t) == 0:
        return float(_horner(np.asarray(c, dtype=float).tolist(), float(t)))
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for ck in c[::-1]:
        acc = acc * t + ck
    return acc


def deriv(c: np.ndarray, order: int = 1) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    for _ in range(order):
        if c.size <= 1:
            return np.zeros(1)
        c = c[1:] * np.arange(1, c.size)
    return c


def integ(c: np.ndarray, const: float = 0.0) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    return np.concatenate(([const], c / np.arange(1, c.size + 1)))


def add(p, q) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = max(p.size, q.size)
    out = np.zeros(n)
    out[: p.size] += p
    out[: q.size] += q
    return out


def sub(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return add(p, -np.asarray(q, dtype=float))


def mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.convolve(p, q)


def shift(c: np.ndarray, d: float) -> np.ndarray:
    """Coefficients of ``s -> p(s + d)`` (Taylor shift by repeated Horner)."""
    a = np.array(c, dtype=float)
    if d == 0.0:
        return a
    n = a.size - 1
    for k in range(n):
        for i in range(n - 1, k - 1, -1):
            a[i] += d * a[i + 1]
    return a


def reflect(c: np.ndarray, w: float) -> np.ndarray:
    """Coefficients of ``s -> p(w - s)``."""
    a = shift(c, w)
    return a * (-1.0) ** np.arange(a.size)


def _horner(c: list, x: float) -> float:
    acc = 0.0
    for ck in reversed(c):
        acc = acc * x + ck
    return acc


def _refine_root(c: list, dc: list, lo: float, hi: float, flo: float) -> float:
    # Safeguarded Newton: fall back to bisection whenever a step leaves the bracket.
    x = 0.5 * (lo + hi)
    tol = ROOT_TOL * max(1.0, abs(lo), abs(hi))
    for _ in range(200):
        fx = _horner(c, x)
        if fx == 0.0:
            return x
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi = x
        if hi - lo <= tol:
            break
        dfx = _horner(dc, x)
        xn = x - fx / dfx if dfx != 0.0 else lo - 1.0
        if lo < xn < hi:
            if abs(xn - x) <= tol:
                return xn
            x = xn
        else:
            x = 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def _quadratic_roots(c) -> list[float]:
    # Cancellation-free form; a (near-)double root with negative discriminant
    # is not a sign change and is skipped.
    c0, c1, c2 = c
    with np.errstate(over="ignore", invalid="ignore"):
        disc = c1 * c1 - 4.0 * c2 * c0
        if not disc >= 0.0:
            return []
        q = -0.5 * (c1 + np.copysign(np.sqrt(disc), c1))
        if q == 0.0:
            return [0.0]
        return [float(q / c2), float(c0 / q)]


def _roots(c: list, lo: float, hi: float) -> list[float]:
    # c is a trimmed list of floats; result sorted and deduplicated
    while len(c) > 1 and c[-1] == 0.0:
        c = c[:-1]
    n = len(c) - 1
    if n <= 0:
        return []
    if n == 1:
        with np.errstate(over="ignore", divide="ignore"):
            r = float(np.float64(-c[0]) / c[1])
        return [r] if lo <= r <= hi else []
    if n == 2:
        return sorted({r for r in _quadratic_roots(c) if lo <= r <= hi})
    dc = [k * c[k] for k in range(1, n + 1)]
    xs = sorted({lo, hi, *_roots(dc, lo, hi)})
    fs = [_horner(c, x) for x in xs]
    roots = {x for x, fx in zip(xs, fs) if fx == 0.0}
    for i in range(len(xs) - 1):
        if fs[i] * fs[i + 1] < 0:
            roots.add(_refine_root(c, dc, xs[i], xs[i + 1], fs[i]))
    return sorted(roots)


def real_roots(c, lo: float, hi: float) -> np.ndarray:
    """Roots of ``c`` in ``[lo, hi]`` at which ``c`` changes sign (or is exactly 0).

    Degree <= 2 is solved directly.  Higher degrees are isolated by the roots
    of the derivative (found recursively): between consecutive critical points
    ``c`` is monotone, so each sign change brackets exactly one root, refined
    to ``ROOT_TOL``.
    """
    if hi < lo:
        return np.empty(0)
    return np.array(_roots(np.asarray(c, dtype=float).tolist(), float(lo), float(hi)), dtype=float)


def _candidates(c: list, w: float) -> list[float]:
    while len(c) > 2 and c[-1] == 0.0:
        c = c[:-1]
    if len(c) <= 2:
        return [0.0, w]
    dc = [k * c[k] for k in range(1, len(c))]
    return [0.0, w, *_roots(dc, 0.0, w)]


def extrema_candidates(c: np.ndarray, w: float) -> np.ndarray:
    """Endpoints and interior critical points of ``c`` on ``[0, w]``."""
    return np.array(_candidates(np.asarray(c, dtype=float).tolist(), float(w)))


def _extreme_values(c, w: float) -> list[float]:
    cl = np.asarray(c, dtype=float).tolist()
    return [_horner(cl, x) for x in _candidates(cl, float(w))]


def max_on(c: np.ndarray, w: float) -> float:
    return float(max(_extreme_values(c, w)))


def min_on(c: np.ndarray, w: float) -> float:
    return float(min(_extreme_values(c, w)))


def absmax_on(c: np.ndarray, w: float) -> float:
    return float(max(abs(v) for v in _extreme_values(c, w)))


def is_zero(c: np.ndarray, w: float, scale: float, rtol: float = NORM_RTOL) -> bool:
    """True if every term ``|c_k| w**k`` is below ``rtol * scale``."""
    c = np.asarray(c, dtype=float)
    mag = np.abs(c) * float(w) ** np.arange(c.size)
    return bool(np.all(mag <= rtol * scale))


def term_scale(c: np.ndarray, w: float) -> float:
    c = np.asarray(c, dtype=float)
    return float(np.max(np.abs(c) * float(w) ** np.arange(c.size)))
