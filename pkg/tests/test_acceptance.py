"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as a script.
"""

import csv
import io
import math
import sys
import time
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np
import pytest

from c2convex import (
    EndpointData,
    PiecewiseFn,
    ToleranceConfig,
    approximate,
    check_convex,
    disagreement_measure,
    epsilon_bound,
    feasibility,
    glue,
    hermite_bridge,
    squeeze_check,
    triangle_bump,
    verify,
)
from c2convex import _poly
from c2convex.bridge import InfeasibleReason
from c2convex.errors import Infeasible
from c2convex.cli import figure1_rows, load_fn, main, store_json
from c2convex.oracle import OracleConfig, quad_moments
from c2convex.piecewise import refine

sys.path.insert(0, str(Path(__file__).parent))
import conftest  # noqa: E402
from derived_cases import CASES  # noqa: E402
from generators import random_convex, random_density  # noqa: E402

FLAT = PiecewiseFn.from_global([-1.0, 0.0, 1.0, 2.0], [[0, 0, 1], [0], [1, -2, 1]])


def record(n, ok, elapsed, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail} ({elapsed:.2f} s)"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return line


class Criterion:
    """Times the body; a raised AssertionError or an overrun marks FAIL."""

    def __init__(self, n, limit=None):
        self.n, self.limit, self.detail = n, limit, ""

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and (self.limit is None or elapsed < self.limit)
        detail = self.detail
        if exc_type is not None:
            detail = f"{detail} [{exc_type.__name__}: {exc}]"
        elif not ok:
            detail = f"{detail} [over the {self.limit:g} s limit]"
        record(self.n, ok, elapsed, detail)
        if exc_type is None and not ok:
            raise AssertionError(f"criterion {self.n} took {elapsed:.2f} s > {self.limit} s")
        return False


def test_criterion_1_end_to_end():
    with Criterion(1, 60.0) as c:
        runs = worst_c2 = worst_curv = 0.0
        for seed in range(200):
            f = random_convex(seed)
            cf = check_convex(f)
            sc = cf.scales
            lo, hi = f.domain
            for frac in (0.1, 0.01):
                for pfrac in (1e-2, 1e-4):
                    cfg = ToleranceConfig(frac * (hi - lo), pfrac * sc.value)
                    # approximate() runs verify() and raises on any contract
                    # violation; the exact report values are re-asserted here
                    g, rep = approximate(cf, cfg)
                    res = g.fn.continuity_residuals()
                    r = max(
                        res[:, 0].max(initial=0) / sc.value,
                        res[:, 1].max(initial=0) / sc.slope,
                        res[:, 2].max(initial=0) / sc.curvature,
                    )
                    curv = -rep.min_curvature / sc.curvature
                    assert r <= 1e-9, f"seed {seed}: C2 residual {r:.3e} x scale"
                    assert curv <= 1e-10, f"seed {seed}: min g'' {-curv:.3e} x curvature scale"
                    assert rep.disagreement < cfg.measure_budget, f"seed {seed}: disagreement"
                    assert rep.sup_error_global <= cfg.error_profile, f"seed {seed}: sup error"
                    worst_c2, worst_curv = max(worst_c2, r), max(worst_curv, curv)
                    runs += 1
        c.detail = (
            f"{int(runs)} pipeline runs certified; worst C2 residual {worst_c2:.1e} x scale, "
            f"worst negative curvature {worst_curv:.1e} x scale"
        )


def test_criterion_2_moments():
    with Criterion(2, 10.0) as c:
        rng = np.random.default_rng(2)
        worst_exact = worst_quad = 0.0
        for _ in range(10_000):
            cc = float(rng.uniform(0.01, 10.0))
            P = float(10 ** rng.uniform(-3, 3))
            tau = cc * float(rng.uniform(0.01, 0.99))
            d = triangle_bump(cc, P, tau)
            m0, m1 = d.closed_form_moments()
            worst_exact = max(worst_exact, abs(m0 - P) / P, abs(m1 / m0 - tau) / tau)
            q0, q1 = quad_moments(d, (0.0, cc), points=d.ts)
            worst_quad = max(worst_quad, abs(q0 - m0) / m0, abs(q1 - m1) / abs(m1))
        assert worst_exact <= 1e-12, worst_exact
        assert worst_quad <= 1e-9, worst_quad
        c.detail = f"10^4 triangles; mass/centroid rel err {worst_exact:.1e}, oracle rel err {worst_quad:.1e}"


def test_criterion_3_height_certificate():
    with Criterion(3, 10.0) as c:
        worst = 0.0
        for seed in range(10_000):
            cc, ts, hs = random_density(seed)
            h = PiecewiseFn.linear_interpolant(ts, hs)
            m0 = float(np.sum(np.diff(ts) * (hs[1:] + hs[:-1]) / 2))
            m1 = float(np.sum(np.diff(ts) * (
                hs[:-1] * (2 * ts[:-1] + ts[1:]) + hs[1:] * (ts[:-1] + 2 * ts[1:])) / 6))
            tau = m1 / m0
            tau = min(max(tau, cc * 1e-15), cc * (1 - 1e-15))
            d = triangle_bump(cc, m0, tau)
            eps = epsilon_bound(h)
            assert d.height <= 4 * eps * (1 + 1e-12), f"seed {seed}: {d.height} > 4 * {eps}"
            worst = max(worst, d.height / (4 * eps))
        exact = epsilon_bound(triangle_bump(2, 1, 0.5))
        assert abs(exact - (4 - 2 * math.sqrt(2))) <= 1e-10
        c.detail = f"10^4 densities; max H / (4 eps) = {worst:.4f}; eps(triangle) = {exact:.15f}"


def _mixture(f, g, theta, lo, hi):
    bps, segs = [lo], []
    for p, w, pf, pg in refine(f, g, lo, hi):
        segs.append(_poly.add(theta * _poly.trim(pf), (1 - theta) * _poly.trim(pg)))
        bps.append(p + w)
    bps[-1] = hi
    return PiecewiseFn(bps, segs)


def test_criterion_4_squeeze():
    with Criterion(4, 10.0) as c:
        rng = np.random.default_rng(4)
        worst = 0.0
        for seed in range(10_000):
            f = random_convex(seed, max_segments=4)
            lo, hi = f.domain
            alpha, beta, gamma = np.sort(rng.uniform(lo, hi, 3))
            if not (beta - alpha > 1e-6 * (hi - lo) and gamma - beta > 1e-6 * (hi - lo)):
                continue
            xs = [float(alpha), float(beta), float(gamma)]
            interp = PiecewiseFn.linear_interpolant(xs, [f.eval(x) for x in xs])
            g = _mixture(f, interp, float(rng.uniform(0, 1)), xs[0], xs[2]) if seed % 2 else interp
            sup, bound = squeeze_check(f, g, *xs)
            assert sup <= bound * (1 + 1e-12)
            if bound > 0:
                worst = max(worst, sup / bound)
        sup, bound = squeeze_check(
            PiecewiseFn([0, 1], [[0, 0, 1]]),
            PiecewiseFn.linear_interpolant([0, 0.5, 1], [0, 0.25, 1]), 0.0, 0.5, 1.0)
        assert abs(sup - 0.0625) <= 1e-12 and bound == 4.0
        c.detail = f"10^4 pairs; max sup / 2L(gamma-alpha) = {worst:.4f}; exact instance sup = {sup!r}, bound {bound!r}"


def test_criterion_5_obstruction():
    with Criterion(5, 1.0) as c:
        left, right = EndpointData(0.0, 0.0, 0.0, 2.0), EndpointData(1.0, 0.0, 0.0, 2.0)
        b = feasibility(1.0, left, right)
        assert str(b) == "Infeasible(OnTangent)", b
        with pytest.raises(Infeasible) as exc:
            hermite_bridge(left, right)
        assert exc.value.reason == InfeasibleReason.ON_TANGENT
        _, rep = approximate(FLAT, ToleranceConfig(0.2, 0.05))
        assert len(rep.intervals) == 2
        for iv in rep.intervals:
            assert not (iv.a <= 0.0 and iv.b >= 1.0)
        spans = ", ".join(f"[{iv.a:.4f}, {iv.b:.4f}]" for iv in rep.intervals)
        c.detail = f"{b}; pipeline corrections {spans}"


def test_criterion_6_glue():
    with Criterion(6, 1.0) as c:
        f = check_convex(FLAT)
        g = glue(f, 0.0, 1.0, 0.25)
        assert g.is_c2
        verify(f, g)
        assert disagreement_measure(f, g) == 1.5 or abs(disagreement_measure(f, g) - 1.5) <= 1e-14
        for lo, hi in ((-1, -0.25), (1.25, 2)):
            xs = np.linspace(lo, hi, 101)
            assert np.max(np.abs(g(xs) - f(xs))) <= 1e-15
        eq = check_convex(PiecewiseFn([-2, -1, 1, 2], [[1, -4, 6, -4, 1], [0], [0, 0, 0, 0, 1]]))
        lin = check_convex(PiecewiseFn([-2, 2], [[-3, 2]]))
        assert glue(eq, -0.5, 0.5, 0.25) is eq and glue(lin, -0.5, 0.5, 0.25) is lin
        c.detail = f"glue is C2 and convex, disagreement {disagreement_measure(f, g)!r}; linear middles unchanged"


def test_criterion_7_scaling():
    with Criterion(7, 1.0) as c:
        c0, P0, rho = 1.0, 1.0, 0.3
        heights, sups = [], []
        for i in range(30):
            cc, P = c0 / 2**i, P0 / 4**i
            tau = rho * cc
            # zero left data; right slope P and value P (c - tau)
            right = EndpointData(cc, P * (cc - tau), P, 0.0)
            b = hermite_bridge(EndpointData(0.0, 0.0, 0.0, 0.0), right)
            heights.append(b.density.height)
            sups.append(b.fn.absmax(2))
        ratios = np.array(heights[1:]) / np.array(heights[:-1])
        assert np.max(np.abs(ratios - 0.5)) <= 1e-12 * 0.5, ratios
        assert all(b < a for a, b in zip(sups, sups[1:]))
        c.detail = f"30 halvings: height ratio within {np.max(np.abs(ratios - 0.5)):.1e} of 1/2, sup|u''| {sups[0]:.3g} -> {sups[-1]:.3g}"


def test_criterion_8_oracle_cross_validation():
    with Criterion(8) as c:
        failed = []
        for name, fn in CASES.items():
            try:
                fn()
            except AssertionError as exc:
                failed.append(f"{name}: {exc}")
        assert not failed, "; ".join(failed)
        c.detail = f"{len(CASES)} derived values reproduced by the oracle and the implementation"


def test_criterion_9_cli(tmp_path):
    with Criterion(9) as c:
        for seed in range(100):
            f = random_convex(seed)
            p = tmp_path / f"{seed}.json"
            store_json(f.to_dict(), str(p))
            back = load_fn(str(p))
            assert back.same_as(f)
            q = tmp_path / f"{seed}b.json"
            store_json(back.to_dict(), str(q))
            assert p.read_bytes() == q.read_bytes()
        src = tmp_path / "flat.json"
        store_json(FLAT.to_dict(), str(src))
        concave = tmp_path / "concave.json"
        store_json(PiecewiseFn.from_global([-1, 0, 1], [[0, 1], [0, -1]]).to_dict(), str(concave))

        def approx(inp, profile, out):
            return main(["approximate", "--input", str(inp), "--measure-budget", "0.2", "--profile", profile,
                         "--output", str(out), "--report", str(tmp_path / "r.json")])

        codes = {}
        with redirect_stdout(io.StringIO()), _quiet_stderr():
            codes[0] = approx(src, "const:0.05", tmp_path / "g.json")
            codes[2] = approx(concave, "const:0.05", tmp_path / "g2.json")
            codes[3] = approx(src, "const:1e-300", tmp_path / "g3.json")
            codes[4] = approx(tmp_path / "missing.json", "const:0.05", tmp_path / "g4.json")
            codes[5] = main(["bridge", "--c", "1", "--left", "0,0,2", "--right", "0,0,2"])
        assert all(k == v for k, v in codes.items()), codes

        buf = io.StringIO()
        with redirect_stdout(buf):
            assert main(["demo", "figure1"]) == 0
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        cases = {r["case"] for r in rows}
        assert cases == {"tau_le_half", "tau_ge_half"}
        for name in cases:
            t = np.array([float(r["t"]) for r in rows if r["case"] == name])
            h = np.array([float(r["h"]) for r in rows if r["case"] == name])
            apex = t[np.argmax(h)]
            assert (apex < t.max() / 2) == (name == "tau_le_half")
        assert figure1_rows() == figure1_rows()
        c.detail = "100 byte-exact JSON round trips; exit codes 0/2/3/4/5; figure1 has both orientations"


class _quiet_stderr:
    def __enter__(self):
        self.old, sys.stderr = sys.stderr, io.StringIO()

    def __exit__(self, *exc):
        sys.stderr = self.old
        return False


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
