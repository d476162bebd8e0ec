"""Deterministic artifact emitters: JSON dumps, CSV tables, SVG diagrams.

Every numeric field is printed through a fixed format (".12g" in CSV/JSON,
".6g" for SVG coordinates), so rerunning the same problem yields byte
identical files.  SVG uses a fixed 800x600 viewbox, x rightward and the
ordinate (u or t) upward.
"""
from __future__ import annotations

import csv
import io
import json
import math

from .errors import ProblemError
from .fronttrack import FrontTrace
from .genfam import WaveFrontCurve
from .piecewise import ExtendedPL, PLFunction

SVG_W = 800
SVG_H = 600
SVG_MARGIN = 60.0

GENUINE_COLOR = "#1f77b4"
FAN_COLOR = "#d62728"
SHOCK_COLOR = "#333333"
REFERENCE_COLOR = "#999999"
ACCENT_COLOR = "#2ca02c"


def _g6(x: float) -> str:
    return format(float(x), ".6g")


def _g12(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def pl_to_json_dict(f: PLFunction | ExtendedPL) -> dict:
    if isinstance(f, ExtendedPL):
        d = pl_to_json_dict(f.core)
        d["domain"] = [f.domain[0], f.domain[1]]
        return d
    return {
        "breakpoints": list(f.breakpoints),
        "values": list(f.values),
        "tails": [f.left_slope, f.right_slope],
    }


def pl_from_json_dict(d: dict) -> PLFunction | ExtendedPL:
    try:
        core = PLFunction(
            tuple(float(b) for b in d["breakpoints"]),
            tuple(float(v) for v in d["values"]),
            float(d["tails"][0]),
            float(d["tails"][1]),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ProblemError(f"bad piecewise-linear JSON: {exc}") from exc
    if "domain" in d:
        return ExtendedPL(core, (float(d["domain"][0]), float(d["domain"][1])))
    return core


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def csv_table(header: list[str], rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_g12(z) for z in row])
    return buf.getvalue()


def profile_csv(named: list[tuple[str, PLFunction]], lo: float, hi: float, samples: int = 257) -> str:
    """Columns x, then one value column per named profile.

    The x grid is the uniform lattice joined with every breakpoint inside
    the window, so kinks appear exactly.
    """
    xs = {lo + (hi - lo) * i / (samples - 1) for i in range(samples)}
    for _, f in named:
        xs.update(b for b in f.breakpoints if lo <= b <= hi)
    grid = sorted(xs)
    rows = [[x] + [f.eval(x) for _, f in named] for x in grid]
    return csv_table(["x"] + [name for name, _ in named], rows)


class SvgBuilder:
    """Collects shapes in data coordinates, renders one 800x600 document."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        if not (x_lo < x_hi) or not (y_lo < y_hi):
            raise ProblemError("empty drawing bounds")
        pad_x = 0.04 * (x_hi - x_lo)
        pad_y = 0.04 * (y_hi - y_lo)
        self.x_lo, self.x_hi = x_lo - pad_x, x_hi + pad_x
        self.y_lo, self.y_hi = y_lo - pad_y, y_hi + pad_y
        self.parts: list[str] = []

    def px(self, x: float) -> float:
        return SVG_MARGIN + (x - self.x_lo) / (self.x_hi - self.x_lo) * (SVG_W - 2 * SVG_MARGIN)

    def py(self, y: float) -> float:
        return SVG_H - SVG_MARGIN - (y - self.y_lo) / (self.y_hi - self.y_lo) * (SVG_H - 2 * SVG_MARGIN)

    def polyline(self, pts, color: str, width: float = 1.5, dashed: bool = False) -> None:
        if len(pts) < 2:
            return
        coords = " ".join(f"{_g6(self.px(x))},{_g6(self.py(y))}" for x, y in pts)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{_g6(width)}"{dash}/>'
        )

    def circle(self, x: float, y: float, r: float, color: str) -> None:
        self.parts.append(
            f'<circle cx="{_g6(self.px(x))}" cy="{_g6(self.py(y))}" r="{_g6(r)}" fill="{color}"/>'
        )

    def text(self, x: float, y: float, s: str, color: str = "#000000", anchor: str = "start") -> None:
        self.parts.append(
            f'<text x="{_g6(self.px(x))}" y="{_g6(self.py(y))}" font-size="13" '
            f'font-family="sans-serif" fill="{color}" text-anchor="{anchor}">{s}</text>'
        )

    def legend(self, entries: list[tuple[str, str]]) -> None:
        # pixel-space legend block in the top-left margin corner
        for i, (label, color) in enumerate(entries):
            y = 24.0 + 18.0 * i
            self.parts.append(
                f'<line x1="{_g6(SVG_MARGIN + 6)}" y1="{_g6(y)}" x2="{_g6(SVG_MARGIN + 34)}" '
                f'y2="{_g6(y)}" stroke="{color}" stroke-width="2"/>'
            )
            self.parts.append(
                f'<text x="{_g6(SVG_MARGIN + 40)}" y="{_g6(y + 4)}" font-size="13" '
                f'font-family="sans-serif" fill="#000000">{label}</text>'
            )

    def frame(self, x_label: str, y_label: str) -> None:
        self.parts.append(
            f'<rect x="{_g6(SVG_MARGIN)}" y="{_g6(SVG_MARGIN)}" '
            f'width="{_g6(SVG_W - 2 * SVG_MARGIN)}" height="{_g6(SVG_H - 2 * SVG_MARGIN)}" '
            f'fill="none" stroke="#888888" stroke-width="1"/>'
        )
        self.parts.append(
            f'<text x="{_g6(SVG_W / 2)}" y="{_g6(SVG_H - 18.0)}" font-size="14" '
            f'font-family="sans-serif" fill="#000000" text-anchor="middle">{x_label}</text>'
        )
        self.parts.append(
            f'<text x="18" y="{_g6(SVG_H / 2)}" font-size="14" font-family="sans-serif" '
            f'fill="#000000" text-anchor="middle" '
            f'transform="rotate(-90 18 {_g6(SVG_H / 2)})">{y_label}</text>'
        )
        for x in (self.x_lo, self.x_hi):
            self.text(x, self.y_lo - 0.0 * (self.y_hi - self.y_lo), _g6(x), "#555555", "middle")
        for y in (self.y_lo, self.y_hi):
            self.text(self.x_lo, y, _g6(y), "#555555", "end")

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_W} {SVG_H}" '
            f'width="{SVG_W}" height="{SVG_H}">\n'
            f'<rect width="{SVG_W}" height="{SVG_H}" fill="#ffffff"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _shock_polyline(shock, t_max: float) -> list[tuple[float, float]]:
    t1 = shock.died_t if shock.died_t is not None else t_max
    t1 = min(t1, t_max)
    if t1 <= shock.born_t:
        return []
    return [(shock.born_x, shock.born_t), (shock.position(t1), t1)]


def shock_diagram_svg(trace: FrontTrace, t_max: float | None = None) -> str:
    """Shock lines of a tracked solution in the (x, t) plane, t upward."""
    T = trace.t_max if t_max is None else t_max
    lines = [p for s in trace.shocks if (p := _shock_polyline(s, T))]
    xs = [x for ln in lines for x, _ in ln]
    if not xs:
        xs = list(trace.v.breakpoints)
    sb = SvgBuilder(min(xs) - 0.5, max(xs) + 0.5, 0.0, T)
    for ln in lines:
        sb.polyline(ln, SHOCK_COLOR, 1.6)
    for e in trace.events:
        if e.kind in ("collision", "merge"):
            sb.circle(e.x, e.t, 4.0, FAN_COLOR)
            sb.text(e.x, e.t, f" ({_g6(e.x)}, {_g6(e.t)})", FAN_COLOR)
    sb.frame("x", "t")
    sb.legend([("shock", SHOCK_COLOR), ("collision", FAN_COLOR)])
    return sb.render()


def overlay_shock_svg(
    reference: FrontTrace,
    shock_paths,
    t_max: float,
) -> str:
    """Reference shock lines with iterated shock samples on top."""
    ref_lines = [p for s in reference.shocks if (p := _shock_polyline(s, t_max))]
    pts = [(q.x, q.t) for path in shock_paths for q in path.points]
    xs = [x for ln in ref_lines for x, _ in ln] + [x for x, _ in pts]
    if not xs:
        xs = list(reference.v.breakpoints)
    sb = SvgBuilder(min(xs) - 0.5, max(xs) + 0.5, 0.0, t_max)
    for ln in ref_lines:
        sb.polyline(ln, REFERENCE_COLOR, 2.5)
    for path in shock_paths:
        sb.polyline([(q.x, q.t) for q in path.points], SHOCK_COLOR, 1.2, dashed=True)
        for q in path.points:
            sb.circle(q.x, q.t, 2.2, ACCENT_COLOR)
    sb.frame("x", "t")
    sb.legend([("tracked shock", REFERENCE_COLOR), ("iterated samples", ACCENT_COLOR)])
    return sb.render()


def wavefront_svg(front: WaveFrontCurve) -> str:
    """Front segments in the (x, u) plane; fans drawn apart from genuine."""
    xs: list[float] = []
    us: list[float] = []
    for s in front.segments:
        xs += [s.start[0], s.end[0]]
        us += [s.start[1], s.end[1]]
    sb = SvgBuilder(min(xs), max(xs) + 1e-9, min(us), max(us) + 1e-9)
    for s in front.segments:
        color = GENUINE_COLOR if s.label == "genuine" else FAN_COLOR
        sb.polyline([s.start, s.end], color, 1.8)
    sb.frame("x", "u")
    sb.legend([("genuine", GENUINE_COLOR), ("fan", FAN_COLOR)])
    return sb.render()


def profiles_svg(named: list[tuple[str, PLFunction]], lo: float, hi: float) -> str:
    """Overlaid u(t, .) profiles on a shared window."""
    if not named:
        raise ProblemError("no profiles to draw")
    palette = [GENUINE_COLOR, FAN_COLOR, ACCENT_COLOR, SHOCK_COLOR, "#9467bd", "#8c564b"]
    ys: list[float] = []
    curves: list[list[tuple[float, float]]] = []
    for _, f in named:
        grid = sorted({lo, hi, *(b for b in f.breakpoints if lo < b < hi)})
        dense: list[float] = []
        for a, b in zip(grid, grid[1:]):
            dense += [a + (b - a) * k / 8 for k in range(8)]
        dense.append(hi)
        pts = [(x, f.eval(x)) for x in dense]
        curves.append(pts)
        ys += [u for _, u in pts]
    sb = SvgBuilder(lo, hi, min(ys), max(ys) + 1e-9)
    entries = []
    for i, ((name, _), pts) in enumerate(zip(named, curves)):
        color = palette[i % len(palette)]
        sb.polyline(pts, color, 1.6)
        entries.append((name, color))
    sb.frame("x", "u")
    sb.legend(entries)
    return sb.render()


def trace_json_dict(trace: FrontTrace) -> dict:
    return {
        "t_max": trace.t_max,
        "v": pl_to_json_dict(trace.v),
        "hamiltonian": pl_to_json_dict(trace.H),
        "pieces": [
            {"slope": p.slope, "const": p.const, "hval": p.hval} for p in trace.pieces
        ],
        "shocks": [
            {
                "born_t": s.born_t,
                "born_x": s.born_x,
                "speed": s.speed,
                "died_t": s.died_t,
            }
            for s in trace.shocks
        ],
        "events": [
            {
                "t": e.t,
                "x": e.x,
                "kind": e.kind,
                "shocks_in": list(e.shocks_in),
                "shocks_out": list(e.shocks_out),
            }
            for e in trace.events
        ],
        "collisions": trace.collisions,
    }
