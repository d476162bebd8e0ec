"""Wave fronts, phase curves, and the section property."""
from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import random_pl
from hjfront.errors import ProblemError
from hjfront.fronttrack import front_track
from hjfront.genfam import (
    FrontSegment,
    GenFamily,
    PhaseCurve,
    WaveFrontCurve,
    _near_degenerate_points,
    big_front,
    build_phase_curve,
    build_wavefront,
    front_corners,
    s_eval,
    section_check,
)
from hjfront.minmax import minmax_step
from hjfront.piecewise import PLFunction, pl_approx
from hjfront.riemann import fan_eval, solve_fan

H_PARAB = pl_approx(lambda p: 0.5 * p * p, 8, (-3.0, 3.0))
H_ABS = PLFunction((0.0,), (0.0,), -1.0, 1.0)


class TestGenFamily:
    def test_time_zero_substitution(self):
        v = PLFunction((0.0,), (0.0,), 1.0, -1.0)
        gf = GenFamily(v, H_PARAB, 0.0)
        for x, y0 in ((0.3, 1.0), (-1.2, -0.5)):
            assert s_eval(gf, x, x, y0) == pytest.approx(v.eval(x), abs=1e-12)

    def test_direct_arithmetic(self):
        v = PLFunction((0.0,), (0.0,), -1.0, 1.0)  # |x|
        gf = GenFamily(v, H_PARAB, 1.0)
        want = v.eval(1.0) + (0.0 - 1.0) * (-1.0) - H_PARAB.eval(-1.0)
        assert s_eval(gf, 0.0, 1.0, -1.0) == pytest.approx(want, abs=1e-12)

    def test_negative_time_rejected(self):
        v = PLFunction((0.0,), (0.0,), -1.0, 1.0)
        with pytest.raises(ProblemError):
            GenFamily(v, H_PARAB, -0.5)


class TestBuildWavefront:
    def test_affine_single_segment(self):
        v = PLFunction.affine(0.7, 0.0, 0.2)
        front = build_wavefront(v, H_PARAB, 0.5)
        assert len(front.segments) == 1
        assert front.segments[0].label == "genuine"
        assert front.segments[0].slope == pytest.approx(0.7)

    def test_riemann_fan_count_and_slopes(self):
        v = PLFunction((0.0,), (0.0,), -1.5, 1.5)
        front = build_wavefront(v, H_PARAB, 0.4)
        fans = [s for s in front.segments if s.label == "fan"]
        inside = [q for q in H_PARAB.breakpoints if -1.5 < q < 1.5]
        assert len(fans) == len(inside)
        assert [s.slope for s in fans] == pytest.approx(inside)

    def test_fan_above_genuine_branches(self):
        # convex H: kink branches ride above the genuine ones, so taking
        # the lower selection of the front recovers the entropy profile
        v = PLFunction((0.0,), (0.0,), 1.0, -1.0)
        front = build_wavefront(v, H_PARAB, 0.5)
        fans = [s for s in front.segments if s.label == "fan"]
        gen = [s for s in front.segments if s.label == "genuine"]
        assert fans
        for f in fans:
            for gx, gu in (f.start, f.end):
                for g in gen:
                    line_u = g.start[1] + g.slope * (gx - g.start[0])
                    assert gu >= line_u - 1e-9

    def test_chain_continuity_and_slope_alphabet(self):
        rng = np.random.default_rng(139)
        for _ in range(10):
            v = random_pl(rng, int(rng.integers(1, 6)))
            H = random_pl(rng, int(rng.integers(1, 6)))
            t = float(rng.uniform(0.1, 1.0))
            front = build_wavefront(v, H, t)
            allowed = set(v.all_slopes) | set(H.breakpoints)
            for a, b in zip(front.segments, front.segments[1:]):
                gap = math.hypot(a.end[0] - b.start[0], a.end[1] - b.start[1])
                assert gap <= 1e-9
            for s in front.segments:
                assert any(abs(s.slope - c) <= 1e-9 for c in allowed)

    def test_fan_sits_on_viscosity_side(self):
        rng = np.random.default_rng(149)
        done = 0
        while done < 8:
            H = random_pl(rng, int(rng.integers(2, 6)))
            p0, p1 = rng.uniform(-1.5, 1.5, size=2)
            if abs(p0 - p1) < 0.2:
                continue
            v = PLFunction((0.0,), (0.0,), float(p0), float(p1))
            fan = solve_fan(float(p0), float(p1), H)
            t = 0.5
            front = build_wavefront(v, H, t)
            sign = 1.0 if p0 < p1 else -1.0
            for s in front.segments:
                if s.label != "fan":
                    continue
                for gx, gu in (s.start, s.end):
                    vis = fan_eval(fan, H, 0.0, t, gx)
                    assert sign * (gu - vis) <= 1e-9
            done += 1

    def test_time_validation(self):
        v = PLFunction((0.0,), (0.0,), -1.0, 1.0)
        with pytest.raises(ProblemError):
            build_wavefront(v, H_PARAB, 0.0)
        with pytest.raises(ProblemError):
            build_wavefront(v, H_PARAB, -1.0)

    def test_json_shape(self):
        v = PLFunction((0.0,), (0.0,), -1.0, 1.0)
        d = build_wavefront(v, H_PARAB, 0.3).to_json_dict()
        assert set(d) == {"t", "segments"}
        assert all(
            set(s) == {"start", "end", "slope", "label", "source"} for s in d["segments"]
        )


class TestSectionCheck:
    def test_viscosity_profile_is_section(self):
        rng = np.random.default_rng(151)
        for _ in range(6):
            v = random_pl(rng, int(rng.integers(1, 5)))
            H = random_pl(rng, int(rng.integers(1, 5)))
            t = float(rng.uniform(0.1, 0.9))
            u = front_track(v, H, t).profile(t)
            front = build_wavefront(v, H, t)
            assert section_check(front, u)

    def test_shifted_profile_fails(self):
        v = PLFunction((0.0,), (0.0,), 1.0, -1.0)
        t = 0.5
        u = front_track(v, H_PARAB, t).profile(t)
        shifted = PLFunction(
            u.breakpoints,
            tuple(w + 1.0 for w in u.values),
            u.left_slope,
            u.right_slope,
        )
        front = build_wavefront(v, H_PARAB, t)
        assert section_check(front, u)
        assert not section_check(front, shifted)

    def test_minmax_profile_is_section(self):
        rng = np.random.default_rng(157)
        done = 0
        while done < 3:
            H = random_pl(rng, int(rng.integers(1, 5)))
            p0, p1 = rng.uniform(-1.5, 1.5, size=2)
            if abs(p0 - p1) < 0.2:
                continue
            v = PLFunction((0.0,), (0.0,), float(p0), float(p1))
            tau = 0.4
            u = minmax_step(v, H, tau)
            front = build_wavefront(v, H, tau)
            assert section_check(front, u)
            done += 1


class TestPhaseCurve:
    def test_time_zero_is_enlarged_pseudograph(self):
        v = PLFunction((0.0,), (0.0,), 1.0, -1.0)
        pc = build_phase_curve(v, H_PARAB, 0.0)
        pts = pc.points
        assert (0.0, 1.0) in pts and (0.0, -1.0) in pts
        # the kink contributes a purely vertical excursion at x = 0
        xs_at_kink = [p for x, p in pts if x == 0.0]
        assert max(xs_at_kink) == pytest.approx(1.0)
        assert min(xs_at_kink) == pytest.approx(-1.0)

    def test_affine_horizontal_line(self):
        v = PLFunction.affine(0.8, 0.0, 0.0)
        pc = build_phase_curve(v, H_PARAB, 0.7)
        assert len(pc.points) == 2
        assert all(p == pytest.approx(0.8) for _, p in pc.points)

    def test_rarefaction_multivaluedness(self):
        # decreasing kink with a nonconvex cubic-type H folds the curve:
        # three preimages over the kink for small positive times
        v = PLFunction((0.0,), (0.0,), 1.2, -2.0 / 3.0)
        H = pl_approx(lambda p: -p**3 + p**2 + p, 40, (-2.0, 2.0))
        pc = build_phase_curve(v, H, 0.05)
        assert pc.preimage_count(0.0) == 3
        pc0 = build_phase_curve(v, H, 0.0)
        assert pc0.preimage_count(0.5) == 1

    def test_json_shape(self):
        v = PLFunction((0.0,), (0.0,), -1.0, 1.0)
        d = build_phase_curve(v, H_PARAB, 0.3).to_json_dict()
        assert set(d) == {"t", "points"}


class TestDiagnostics:
    def test_corner_at_shock(self):
        v = PLFunction((0.0,), (0.0,), 1.0, -1.0)
        front = build_wavefront(v, H_ABS, 0.5)
        corners = front_corners(front)
        assert corners
        assert any(abs(u - v.eval(0.0)) < 2.0 for _, u in corners)

    def test_triple_meet_detected(self):
        segs = (
            FrontSegment((-1.0, -1.0), (1.0, 1.0), 1.0, "genuine", (0.0, 1.0)),
            FrontSegment((-1.0, 1.0), (1.0, -1.0), -1.0, "genuine", (0.0, 1.0)),
            FrontSegment((-1.0, 0.0), (1.0, 0.0), 0.0, "fan", 0.0),
        )
        pts = _near_degenerate_points(segs)
        assert len(pts) == 1
        assert pts[0] == pytest.approx((0.0, 0.0), abs=1e-12)

    def test_generic_front_not_degenerate(self):
        v = PLFunction((0.0,), (0.0,), -1.5, 1.5)
        front = build_wavefront(v, H_PARAB, 0.4)
        assert _near_degenerate_points(front.segments) == []


class TestBigFront:
    def test_shock_moves_continuously(self):
        v = PLFunction((0.0,), (0.0,), 1.0, -1.0)
        times = [0.1 * k for k in range(1, 9)]
        fronts = big_front(v, H_PARAB, times)
        xs = []
        for f in fronts:
            cs = front_corners(f)
            assert cs
            xs.append(min(cs, key=lambda c: abs(c[0]))[0])
        for a, b in zip(xs, xs[1:]):
            assert abs(b - a) <= 0.1 * H_PARAB.lipschitz + 1e-9
