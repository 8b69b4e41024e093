"""Independent numerical checks.

Everything here sees functions only through pointwise evaluation: adaptive
Simpson quadrature, central differences, dense grids and Monte-Carlo
sampling.  Nothing is imported from the exact polynomial calculus.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence

SEED_ENV = "C2CONVEX_SEED"
DEFAULT_SEED = 20240917


@dataclass(frozen=True)
class OracleConfig:
    quad_tol: float = 1e-10
    grid_points: int = 100_000
    mc_samples: int = 1_000_000
    fd_step: float = 1e-6
    seed: int = DEFAULT_SEED
    max_depth: int = 50

    def __post_init__(self):
        if min(self.quad_tol, self.grid_points, self.mc_samples, self.fd_step) <= 0:
            raise ValueError("oracle settings must be positive")

    @classmethod
    def from_env(cls, **kw) -> "OracleConfig":
        seed = os.environ.get(SEED_ENV)
        if seed is not None:
            kw.setdefault("seed", int(seed))
        return cls(**kw)


def adaptive_simpson(fun, a: float, b: float, tol: float, max_depth: int = 50, min_depth: int = 2):
    """Integrate a (possibly vector-valued) ``fun`` over ``[a, b]``.

    Raises NonConvergence if a panel still fails the error test at
    ``max_depth``.
    """
    fa, fm, fb = (np.asarray(fun(x), dtype=float) for x in (a, 0.5 * (a + b), b))
    whole = (b - a) * (fa + 4 * fm + fb) / 6.0
    total = np.zeros_like(whole)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        flm = np.asarray(fun(0.5 * (a + m)), dtype=float)
        frm = np.asarray(fun(0.5 * (m + b)), dtype=float)
        left = (m - a) * (fa + 4 * flm + fm) / 6.0
        right = (b - m) * (fm + 4 * frm + fb) / 6.0
        delta = left + right - whole
        if depth >= min_depth and np.max(np.abs(delta)) <= 15.0 * tol:
            total = total + left + right + delta / 15.0
        elif depth >= max_depth:
            raise NonConvergence(f"adaptive Simpson did not converge on [{a!r}, {b!r}]")
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
    return total


def quad_moments(h, interval, cfg: OracleConfig | None = None, points=None) -> tuple[float, float]:
    """``(int h, int t h)`` over ``interval`` by adaptive Simpson.

    ``points`` are optional interior locations where ``h`` may be non-smooth;
    the interval is split there first.
    """
    cfg = cfg or OracleConfig()
    lo, hi = map(float, interval)
    cuts = [lo, hi]
    if points is not None:
        cuts += [float(p) for p in points if lo < p < hi]
    cuts = sorted(set(cuts))

    def both(t):
        v = float(h(t))
        return (v, t * v)

    mass = moment = 0.0
    for p, q in zip(cuts[:-1], cuts[1:]):
        tol = cfg.quad_tol * (q - p) / (hi - lo)
        m0, m1 = adaptive_simpson(both, p, q, tol, cfg.max_depth)
        mass += m0
        moment += m1
    return float(mass), float(moment)


def fd_check(u, x: float, order: int = 1, cfg: OracleConfig | None = None) -> float:
    """Central-difference estimate of ``u'(x)`` or ``u''(x)``.

    Order 2 uses a step 100 times larger than ``fd_step`` to keep round-off
    (which grows like ``1/step**2``) below truncation error.
    """
    cfg = cfg or OracleConfig()
    if order == 1:
        s = cfg.fd_step
        return (float(u(x + s)) - float(u(x - s))) / (2 * s)
    if order == 2:
        s = 100 * cfg.fd_step
        return (float(u(x + s)) - 2 * float(u(x)) + float(u(x - s))) / (s * s)
    raise ValueError("order must be 1 or 2")


def _vec(fun):
    def call(xs):
        try:
            out = np.asarray(fun(xs), dtype=float)
            if out.shape == xs.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(fun(float(x))) for x in xs])

    return call


@dataclass(frozen=True)
class SampleReport:
    convexity_violations: int
    grid_sup: float
    mc_fraction: float
    mc_samples: int
    length: float

    @property
    def mc_measure(self) -> float:
        return self.mc_fraction * self.length

    def sigma_for(self, exact: float) -> float:
        """Binomial standard deviation of the measure estimate if ``exact`` is true."""
        p = min(max(exact / self.length, 0.0), 1.0)
        return self.length * np.sqrt(p * (1 - p) / self.mc_samples)

    def covers(self, exact: float, k: float = 3.0) -> bool:
        return abs(self.mc_measure - exact) <= k * self.sigma_for(exact) + 1e-15 * self.length


def sample_checks(f, g, interval, cfg: OracleConfig | None = None) -> SampleReport:
    """Grid midpoint-convexity of ``g``, grid ``sup |f - g|`` and a Monte-Carlo
    estimate of ``|{f != g}|`` on ``interval``."""
    cfg = cfg or OracleConfig()
    lo, hi = map(float, interval)
    fv, gv = _vec(f), _vec(g)
    xs = np.linspace(lo, hi, cfg.grid_points)
    fx, gx = fv(xs), gv(xs)
    d2 = gx[:-2] - 2 * gx[1:-1] + gx[2:]
    gscale = max(np.max(np.abs(gx)), 1e-300)
    violations = int(np.count_nonzero(d2 < -64 * np.finfo(float).eps * gscale))
    grid_sup = float(np.max(np.abs(fx - gx)))
    fscale = np.max(np.abs(fx))
    fscale = fscale if fscale > 0 else 1.0
    rng = np.random.default_rng(cfg.seed)
    hits = 0
    chunk = 250_000
    done = 0
    while done < cfg.mc_samples:
        n = min(chunk, cfg.mc_samples - done)
        u = rng.uniform(lo, hi, n)
        hits += int(np.count_nonzero(np.abs(fv(u) - gv(u)) > 1e-12 * fscale))
        done += n
    return SampleReport(violations, grid_sup, hits / cfg.mc_samples, cfg.mc_samples, hi - lo)
