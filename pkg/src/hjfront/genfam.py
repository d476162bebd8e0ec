"""Geometric solution: wave fronts and phase curves of the generalized flow.

A linear piece of the initial condition with slope p rides the flow as a
straight segment: each source point (x0, v(x0)) moves to
(x0 + t*H'(p), v(x0) + t*(p*H'(p) - H(p))).  At a kink the slope sweeps the
whole jump interval, and for piecewise linear H the swept curve degenerates
into one straight segment per breakpoint of H inside the jump, with that
breakpoint as its slope.  The resulting multivalued front contains the graph
of the minmax solution as a continuous section.
"""
from __future__ import annotations

import math
import warnings
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .errors import ProblemError
from .piecewise import PLFunction


@dataclass(frozen=True)
class GenFamily:
    """Fiber family S(x, x0, y0) = v(x0) - t*H(y0) + (x - x0)*y0."""

    v: PLFunction
    H: PLFunction
    t: float

    def __post_init__(self) -> None:
        if self.t < 0.0 or not math.isfinite(self.t):
            raise ProblemError("time must be nonnegative and finite")


def s_eval(gf: GenFamily, x: float, x0: float, y0: float) -> float:
    return gf.v.eval(x0) - gf.t * gf.H.eval(y0) + (x - x0) * y0


@dataclass(frozen=True)
class FrontSegment:
    """Straight piece of the wave front in the (x, u) plane."""

    start: tuple[float, float]
    end: tuple[float, float]
    slope: float
    label: str  # "genuine" or "fan"
    source: tuple[float, float] | float  # source interval, or kink abscissa

    def to_json_dict(self) -> dict:
        src = list(self.source) if isinstance(self.source, tuple) else self.source
        return {
            "start": list(self.start),
            "end": list(self.end),
            "slope": self.slope,
            "label": self.label,
            "source": src,
        }


@dataclass(frozen=True)
class WaveFrontCurve:
    """Front segments in source order; multivalued regions are kept."""

    t: float
    segments: tuple[FrontSegment, ...]

    def x_range(self) -> tuple[float, float]:
        xs = [s.start[0] for s in self.segments] + [s.end[0] for s in self.segments]
        return min(xs), max(xs)

    def to_json_dict(self) -> dict:
        return {"t": self.t, "segments": [s.to_json_dict() for s in self.segments]}


@dataclass(frozen=True)
class PhaseCurve:
    """Image of the pseudograph of dv under the flow, as an (x, p) polyline."""

    t: float
    points: tuple[tuple[float, float], ...]

    def to_json_dict(self) -> dict:
        return {"t": self.t, "points": [list(p) for p in self.points]}

    def preimage_count(self, x: float) -> int:
        """Number of polyline crossings of the vertical line at x."""
        n = 0
        for (xa, _), (xb, _) in zip(self.points, self.points[1:]):
            lo, hi = min(xa, xb), max(xa, xb)
            if lo < x < hi:
                n += 1
        return n


def _h_sides(H: PLFunction, q: float) -> tuple[float, float]:
    """One-sided slopes (left, right) of H at q."""
    b = H.breakpoints
    i = bisect_left(b, q)
    if i < len(b) and b[i] == q:
        s = H.all_slopes
        return s[i], s[i + 1]
    d = H.slope_at(q)
    return d, d


def _piece_layout(v: PLFunction, pad: float) -> tuple[list[tuple[float, float]], list[float]]:
    """Source intervals between kinks (tails clipped by pad) and their slopes."""
    ks = v.kinks()
    if not ks:
        mid = v.breakpoints[0]
        return [(mid - pad, mid + pad)], [v.left_slope]
    xs = [k[0] for k in ks]
    sources = [(xs[0] - pad, xs[0])]
    sources += [(a, b) for a, b in zip(xs, xs[1:])]
    sources.append((xs[-1], xs[-1] + pad))
    slopes = [ks[0][1]] + [k[2] for k in ks]
    return sources, slopes


def _default_pad(v: PLFunction, H: PLFunction, t: float) -> float:
    return 2.0 + 2.0 * t * H.lipschitz


def build_wavefront(v: PLFunction, H: PLFunction, t: float, pad: float | None = None) -> WaveFrontCurve:
    """Wave front at time t: transported pieces plus one fan segment per
    H-breakpoint inside each kink's jump, in source order."""
    if t <= 0.0 or not math.isfinite(t):
        raise ProblemError("time must be positive and finite")
    v = v.normalized()
    if pad is None:
        pad = _default_pad(v, H, t)
    sources, slopes = _piece_layout(v, pad)
    ks = v.kinks()
    segs: list[FrontSegment] = []
    for i, ((a, b), p) in enumerate(zip(sources, slopes)):
        dl, dr = _h_sides(H, p)
        lo_d, hi_d = min(dl, dr), max(dl, dr)
        shift = -t * H.eval(p)
        seg = FrontSegment(
            (a + t * lo_d, v.eval(a) + t * p * lo_d + shift),
            (b + t * hi_d, v.eval(b) + t * p * hi_d + shift),
            p,
            "genuine",
            (a, b),
        )
        segs.append(seg)
        if i < len(ks):
            xbar, pl, pr = ks[i]
            lo_q, hi_q = min(pl, pr), max(pl, pr)
            inside = [q for q in H.breakpoints if lo_q < q < hi_q]
            if pl > pr:
                inside.reverse()
            vbar = v.eval(xbar)
            for q in inside:
                dl, dr = _h_sides(H, q)
                if pl > pr:
                    dl, dr = dr, dl
                hq = H.eval(q)
                segs.append(
                    FrontSegment(
                        (xbar + t * dl, vbar + t * (q * dl - hq)),
                        (xbar + t * dr, vbar + t * (q * dr - hq)),
                        q,
                        "fan",
                        xbar,
                    )
                )
    front = WaveFrontCurve(t, tuple(segs))
    for px, pu in _near_degenerate_points(front.segments):
        warnings.warn(
            f"near-degenerate front: three or more segments meet near ({px:.6g}, {pu:.6g})",
            RuntimeWarning,
            stacklevel=2,
        )
    return front


def _seg_point_dist(px: float, pu: float, seg: FrontSegment) -> float:
    ax, ay = seg.start
    bx, by = seg.end
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - ax, pu - ay)
    s = ((px - ax) * dx + (pu - ay) * dy) / L2
    s = min(1.0, max(0.0, s))
    return math.hypot(px - ax - s * dx, pu - ay - s * dy)


def _near_degenerate_points(
    segments: tuple[FrontSegment, ...], tol: float = 1e-9
) -> list[tuple[float, float]]:
    """Points where at least three distinct segments pass within tol."""
    pts: list[tuple[float, float]] = []
    n = len(segments)
    for i in range(n):
        ax, ay = segments[i].start
        bx, by = segments[i].end
        for j in range(i + 1, n):
            cx, cy = segments[j].start
            ex, ey = segments[j].end
            d1x, d1y = bx - ax, by - ay
            d2x, d2y = ex - cx, ey - cy
            den = d1x * d2y - d1y * d2x
            if abs(den) < 1e-14:
                continue
            s = ((cx - ax) * d2y - (cy - ay) * d2x) / den
            w = ((cx - ax) * d1y - (cy - ay) * d1x) / den
            if -1e-9 <= s <= 1.0 + 1e-9 and -1e-9 <= w <= 1.0 + 1e-9:
                px, pu = ax + s * d1x, ay + s * d1y
                hits = sum(1 for sg in segments if _seg_point_dist(px, pu, sg) <= tol)
                if hits >= 3 and not any(
                    math.hypot(px - qx, pu - qu) <= 10.0 * tol for qx, qu in pts
                ):
                    pts.append((px, pu))
    return pts


def front_corners(front: WaveFrontCurve, tol: float = 1e-9) -> list[tuple[float, float]]:
    """Junction points where consecutive segments meet with a slope break.

    Piecewise linear fronts have corners where a smooth Hamiltonian would
    show cusps; this is the graceful degradation of that diagnostic.
    """
    out = []
    for a, b in zip(front.segments, front.segments[1:]):
        ex, eu = a.end
        sx, su = b.start
        if math.hypot(ex - sx, eu - su) <= tol and abs(a.slope - b.slope) > tol:
            out.append((0.5 * (ex + sx), 0.5 * (eu + su)))
    return out


def build_phase_curve(v: PLFunction, H: PLFunction, t: float, pad: float | None = None) -> PhaseCurve:
    """Flowed pseudograph of dv in the (x, p) plane, as a staircase polyline.

    Smooth strata transport horizontally by t*H'(p); each kink contributes a
    sweep over its jump, vertical along linear pieces of H and horizontal at
    breakpoints of H (the full subdifferential is swept, no smoothing).
    """
    if t < 0.0 or not math.isfinite(t):
        raise ProblemError("time must be nonnegative and finite")
    v = v.normalized()
    if pad is None:
        pad = _default_pad(v, H, t)
    sources, slopes = _piece_layout(v, pad)
    ks = v.kinks()
    pts: list[tuple[float, float]] = []

    def push(x: float, p: float) -> None:
        if not pts or math.hypot(x - pts[-1][0], p - pts[-1][1]) > 1e-12:
            pts.append((x, p))

    for i, ((a, b), p) in enumerate(zip(sources, slopes)):
        dl, dr = _h_sides(H, p)
        lo_d, hi_d = min(dl, dr), max(dl, dr)
        push(a + t * lo_d, p)
        push(b + t * hi_d, p)
        if i < len(ks):
            xbar, pl, pr = ks[i]
            lo_q, hi_q = min(pl, pr), max(pl, pr)
            inside = [q for q in H.breakpoints if lo_q < q < hi_q]
            if pl > pr:
                inside.reverse()
            for q in inside:
                dl, dr = _h_sides(H, q)
                if pl > pr:
                    dl, dr = dr, dl
                push(xbar + t * dl, q)
                push(xbar + t * dr, q)
            # the sweep's exit point at pr is pushed by the next stratum
    return PhaseCurve(t, tuple(pts))


def section_check(
    front: WaveFrontCurve, u: PLFunction, samples: int = 1000, tol: float = 1e-8
) -> bool:
    """True when the graph of u stays within tol of the front's segments."""
    lo, hi = front.x_range()
    xs = np.linspace(lo, hi, samples)
    for x in xs:
        ux = u.eval(float(x))
        d = min(_seg_point_dist(float(x), ux, s) for s in front.segments)
        if d > tol:
            return False
    return True


def big_front(v: PLFunction, H: PLFunction, times: list[float]) -> tuple[WaveFrontCurve, ...]:
    """Fronts over a time grid; their (t, x) union is the big front."""
    out = []
    for t in times:
        out.append(build_wavefront(v, H, float(t)))
    return tuple(out)
