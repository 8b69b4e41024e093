"""Kink rounding: turn a convex piecewise polynomial into a C^{1,1} one.

Each slope jump ``J`` at ``x0`` (a Dirac mass ``J`` in ``f''``) is replaced
by the box density ``J / (2 delta)`` on ``[x0 - delta, x0 + delta]``.  The box
has the Dirac's mass and centroid, so value and slope at ``x0 + delta`` are
unchanged and the function is untouched outside the box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _poly
from .errors import BudgetTooTight
from .piecewise import ConvexFn, PiecewiseFn, Regularity, check_convex

GAP_FRACTION = 0.49


@dataclass(frozen=True)
class KinkRecord:
    location: float
    jump: float
    radius: float

    @property
    def interval(self) -> tuple[float, float]:
        return self.location - self.radius, self.location + self.radius

    @property
    def height(self) -> float:
        return self.jump / (2.0 * self.radius)

    def box_moments(self) -> tuple[float, float]:
        """Closed-form ``(int box, int t * box)``; equal to ``(J, J * x0)``."""
        lo, hi = self.interval
        return self.height * (hi - lo), self.height * (hi * hi - lo * lo) / 2.0

    def to_dict(self) -> dict:
        return {"location": self.location, "jump": self.jump, "radius": self.radius}


def round_kinks(
    f: ConvexFn,
    budget: float,
    tol: float | None = None,
    error_profile: PiecewiseFn | None = None,
) -> tuple[ConvexFn, list[KinkRecord]]:
    """Replace every slope kink of ``f`` by a box of added curvature.

    Radii are ``budget / (2K)`` for ``K`` kinks, capped at 0.49 times the
    distance to the nearest other breakpoint or domain endpoint.  If
    ``error_profile`` is given the radius is further capped so the induced
    error ``J * delta / 4`` stays below half the profile's minimum on the box.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    bp = f.breakpoints
    kink_idx = [j + 1 for j, r in enumerate(f.regularity) if r is Regularity.C0_KINK]
    if not kink_idx:
        return f, []
    length = bp[-1] - bp[0]
    base = budget / (2 * len(kink_idx))
    radius: dict[int, float] = {}
    jumps: dict[int, float] = {}
    records = []
    for i in kink_idx:
        x0 = float(bp[i])
        gap = min(bp[i] - bp[i - 1], bp[i + 1] - bp[i])
        delta = min(base, GAP_FRACTION * gap)
        jump = f.eval(x0, 1, "right") - f.eval(x0, 1, "left")
        if error_profile is not None:
            eps_min = error_profile.minimum(x0 - delta, x0 + delta)
            delta = min(delta, 2.0 * eps_min / jump)
        if not delta > 1e-12 * length:
            raise BudgetTooTight(
                f"kink at {x0!r} admits no replacement interval (radius {delta:.3e})"
            )
        radius[i], jumps[i] = float(delta), float(jump)
        records.append(KinkRecord(x0, float(jump), float(delta)))

    new_bp: list[float] = []
    segs: list[np.ndarray] = []
    for j, (c, w) in enumerate(zip(f.fn.segments, f.fn.widths)):
        left, right = float(bp[j]), float(bp[j + 1])
        dl = radius.get(j, 0.0)
        dr = radius.get(j + 1, 0.0)
        if dl:
            # right half of the box at bp[j]: f_j + (J / 4d) (d - t)^2
            jl = jumps[j]
            new_bp.append(left)
            segs.append(_poly.add(c, [jl * dl / 4.0, -jl / 2.0, jl / (4.0 * dl)]))
        new_bp.append(left + dl)
        segs.append(_poly.shift(c, dl))
        if dr:
            # left half of the box at bp[j + 1]: f_j + (J / 4d) t^2
            jr = jumps[j + 1]
            new_bp.append(right - dr)
            segs.append(_poly.add(_poly.shift(c, w - dr), [0.0, 0.0, jr / (4.0 * dr)]))
    new_bp.append(float(bp[-1]))
    g = PiecewiseFn(new_bp, segs)
    return check_convex(g, tol_conv=tol, tol_cont=f.tol_cont), records
