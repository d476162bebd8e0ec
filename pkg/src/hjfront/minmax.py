"""Mountain-pass value of the generating family on a fiber grid.

The fiber function S(x0, y0) = v(x0) - t*H(y0) + (x - x0)*y0 behaves like
the quadratic -x0*y0 far from the origin, so deep sublevel sets have two
unbounded components (quadrants I and III of the (x0, y0) plane) and deep
superlevel sets the other two.  The saddle value is computed by inserting
grid cells in increasing S order into a union-find structure until the two
low corners connect; the decreasing sweep joining the high corners gives
the dual value.  Closed-form reductions for convex H or convex v serve as
exact references.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import BoxTooSmallError, ProblemError
from .piecewise import PLFunction, conjugate

HUGE = 1 << 62


@dataclass(frozen=True)
class FiberBox:
    """Rectangle in the (x0, y0) fiber plane."""

    x0_lo: float
    x0_hi: float
    y0_lo: float
    y0_hi: float

    def __post_init__(self) -> None:
        for z in (self.x0_lo, self.x0_hi, self.y0_lo, self.y0_hi):
            if not math.isfinite(z):
                raise ProblemError("non-finite box bound")
        if not (self.x0_lo < self.x0_hi and self.y0_lo < self.y0_hi):
            raise ProblemError("empty fiber box")

    def grids(self, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(self.x0_lo, self.x0_hi, nx),
            np.linspace(self.y0_lo, self.y0_hi, ny),
        )

    def scaled(self, factor: float) -> "FiberBox":
        cx = 0.5 * (self.x0_lo + self.x0_hi)
        cy = 0.5 * (self.y0_lo + self.y0_hi)
        wx = 0.5 * (self.x0_hi - self.x0_lo) * factor
        wy = 0.5 * (self.y0_hi - self.y0_lo) * factor
        return FiberBox(cx - wx, cx + wx, cy - wy, cy + wy)


@dataclass
class PassResult:
    minmax_value: float
    maxmin_value: float
    tol: float
    saddle_cell: tuple[int, int]
    nx: int
    ny: int
    box: FiberBox
    refine_delta: float | None = None


def _slope_hull(H: PLFunction, lo: float, hi: float) -> tuple[float, float]:
    """Range of slopes H takes on [lo, hi]."""
    bps, sl = H.breakpoints, H.all_slopes
    i0 = bisect_left(bps, lo)
    i1 = bisect_right(bps, hi)
    ss = sl[i0 : i1 + 1]
    return min(ss), max(ss)


def default_box(v: PLFunction, H: PLFunction, t: float, x: float, margin: float = 1.0) -> FiberBox:
    """Box containing every critical fiber point, with gradient margins.

    y0 spans the slope range of v plus a margin; x0 covers the breakpoints
    of v and all backward characteristics x - t*H'(y0), so that on each box
    edge S is strictly monotone toward the two low corners.
    """
    Y = v.lipschitz + margin
    qlo, qhi = _slope_hull(H, -Y, Y)
    lo = min(v.breakpoints[0], x - t * qhi) - margin
    hi = max(v.breakpoints[-1], x - t * qlo) + margin
    return FiberBox(lo, hi, -Y, Y)


def fiber_values(
    v: PLFunction, H: PLFunction, t: float, x: float, box: FiberBox, nx: int, ny: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample S on the grid; S[i, j] pairs x0[i] with y0[j]."""
    x0, y0 = box.grids(nx, ny)
    S = v.eval_many(x0)[:, None] - t * H.eval_many(y0)[None, :] + np.outer(x - x0, y0)
    return x0, y0, S


def _edges_monotone(S: np.ndarray) -> bool:
    """True when each border edge decreases toward the two low corners.

    This is the certificate that outside excursions cannot lower the pass
    value: any path leaving the box can be replaced by a border segment
    without raising its maximum.
    """
    return bool(
        np.all(np.diff(S[0, :]) > 0.0)
        and np.all(np.diff(S[-1, :]) < 0.0)
        and np.all(np.diff(S[:, 0]) > 0.0)
        and np.all(np.diff(S[:, -1]) < 0.0)
    )


def _pass_threshold(
    S: np.ndarray,
    seed_a: tuple[int, int],
    seed_b: tuple[int, int],
    ascending: bool,
    eight: bool,
) -> tuple[float, tuple[int, int]]:
    """Level at which the seeds join in the (sub/super) level filtration."""
    nx, ny = S.shape
    P = ny + 2
    total = (nx + 2) * P
    flat = S.ravel()
    order = np.argsort(flat, kind="stable")
    if not ascending:
        order = order[::-1]
    padded = ((order // ny) + 1) * P + (order % ny) + 1
    rank = np.full(total, HUGE, dtype=np.int64)
    rank[padded] = np.arange(order.size)
    rank_l = rank.tolist()
    cells = padded.tolist()
    parent = list(range(total))
    sa = (seed_a[0] + 1) * P + seed_a[1] + 1
    sb = (seed_b[0] + 1) * P + seed_b[1] + 1
    both_in = max(rank_l[sa], rank_l[sb])
    if eight:
        offs = (-P - 1, -P, -P + 1, -1, 1, P - 1, P, P + 1)
    else:
        offs = (-P, -1, 1, P)
    for r, c in enumerate(cells):
        changed = False
        for off in offs:
            nb = c + off
            if rank_l[nb] < r:
                a = c
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = nb
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[b] = a
                    changed = True
        if changed and r >= both_in:
            a = sa
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = sb
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a == b:
                idx = int(order[r])
                return float(flat[idx]), (idx // ny, idx % ny)
    idx = int(order[-1])
    return float(flat[idx]), (idx // ny, idx % ny)


def _grid_tol(v: PLFunction, H: PLFunction, t: float, x: float, box: FiberBox, nx: int, ny: int) -> float:
    hx = (box.x0_hi - box.x0_lo) / (nx - 1)
    hy = (box.y0_hi - box.y0_lo) / (ny - 1)
    h = max(hx, hy)
    y_abs = max(abs(box.y0_lo), abs(box.y0_hi))
    x_abs = max(abs(x - box.x0_lo), abs(x - box.x0_hi))
    qlo, qhi = _slope_hull(H, box.y0_lo, box.y0_hi)
    lip_H = max(abs(qlo), abs(qhi))
    Lx = v.lipschitz + y_abs
    Ly = t * lip_H + x_abs
    return 2.0 * h * math.hypot(Lx, Ly)


def _run_passes(S: np.ndarray) -> tuple[float, tuple[int, int], float]:
    nx, ny = S.shape
    mm, cell = _pass_threshold(S, (nx - 1, ny - 1), (0, 0), ascending=True, eight=True)
    Mm, _ = _pass_threshold(S, (0, ny - 1), (nx - 1, 0), ascending=False, eight=False)
    return mm, cell, Mm


def minmax_grid(
    v: PLFunction,
    H: PLFunction,
    t: float,
    x: float,
    nx: int = 64,
    ny: int = 64,
    box: FiberBox | None = None,
    margin: float = 1.0,
    check_refinement: bool = False,
) -> PassResult:
    """Discrete mountain-pass (and dual) value of the fiber function.

    The box is enlarged up to three times when the edge-monotonicity
    certificate fails; an explicit box is used as given first, then scaled.
    """
    if t < 0.0 or not math.isfinite(t):
        raise ProblemError("time must be nonnegative and finite")
    if nx < 8 or ny < 8:
        raise ProblemError("grid must be at least 8x8")
    v = v.normalized()
    for k in range(4):
        if box is None:
            cand = default_box(v, H, t, x, margin=margin * 2.0**k)
        else:
            cand = box if k == 0 else box.scaled(2.0**k)
        _, _, S = fiber_values(v, H, t, x, cand, nx, ny)
        if _edges_monotone(S):
            mm, cell, Mm = _run_passes(S)
            tol = _grid_tol(v, H, t, x, cand, nx, ny)
            delta = None
            if check_refinement:
                _, _, S2 = fiber_values(v, H, t, x, cand, nx // 2, ny // 2)
                mm2, _, _ = _run_passes(S2)
                delta = abs(mm - mm2)
            return PassResult(mm, Mm, tol, cell, nx, ny, cand, delta)
    raise BoxTooSmallError("box too small")


def _join_level(S: np.ndarray) -> float:
    """Exact level at which the two low corners of S join, S bilinear per cell.

    Candidate levels are the corner values and the interior saddle values
    of cells; sweeping them in increasing order with a union-find over
    corners reproduces sublevel connectivity exactly.  Within a cell, a
    low diagonal corner pair with the other pair high forces the saddle
    strictly inside (the opposite split is impossible since the bilinear
    coefficient has fixed sign), so that connection is gated by the saddle
    value; every other corner adjacency reduces to a grid edge.
    """
    nx, ny = S.shape
    f00 = S[:-1, :-1]
    f10 = S[1:, :-1]
    f01 = S[:-1, 1:]
    f11 = S[1:, 1:]
    su = f10 - f00
    uu = f01 - f00
    w = f00 - f10 - f01 + f11
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = -uu / w
        eta = -su / w
        sval = f00 - su * uu / w
    inside = (w != 0.0) & (xi > 0.0) & (xi < 1.0) & (eta > 0.0) & (eta < 1.0)
    ci, cj = np.nonzero(inside)
    levels = np.concatenate([S.ravel(), sval[ci, cj]])
    kinds = np.concatenate(
        [np.zeros(S.size, dtype=np.int8), np.ones(ci.size, dtype=np.int8)]
    )
    payload = np.concatenate([np.arange(S.size), ci * ny + cj])
    order = np.lexsort((kinds, levels))
    lv = levels[order]
    kd = kinds[order]
    pl = payload[order]
    parent = list(range(nx * ny))
    entered = bytearray(nx * ny)

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    sa, sb = 0, nx * ny - 1
    for r in range(order.size):
        p = int(pl[r])
        if kd[r] == 0:
            entered[p] = 1
            i, j = divmod(p, ny)
            for nb in (
                p - ny if i > 0 else -1,
                p + ny if i + 1 < nx else -1,
                p - 1 if j > 0 else -1,
                p + 1 if j + 1 < ny else -1,
            ):
                if nb >= 0 and entered[nb]:
                    ra, rb = find(p), find(nb)
                    if ra != rb:
                        parent[rb] = ra
        else:
            a = p
            b = p + ny + 1
            if entered[a] and entered[b]:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
        if find(sa) == find(sb):
            return float(lv[r])
    return float(lv[-1])


def minmax_exact(
    v: PLFunction,
    H: PLFunction,
    t: float,
    x: float,
    box: FiberBox | None = None,
    margin: float = 1.0,
) -> float:
    """Exact mountain-pass value of the fiber function for PL data.

    On the grid whose lines are the breakpoints of v (x0 axis) and of H
    (y0 axis) the fiber function is bilinear per cell, so the level at
    which the two deep sublevel quadrants join is one of finitely many
    candidates and `_join_level` finds it exactly.  Every join level is a
    critical value: in-cell saddles solve y0 = v'(x0), x0 = x - t*H'(y0)
    (a transported piece value) and corner joins happen at kink/breakpoint
    pairs (fan values).  The box is enlarged as in minmax_grid when the
    edge-monotonicity certificate fails.
    """
    if t < 0.0 or not math.isfinite(t):
        raise ProblemError("time must be nonnegative and finite")
    v = v.normalized()
    if t == 0.0:
        return v.eval(x)
    for k in range(4):
        if box is None:
            cand = default_box(v, H, t, x, margin=margin * 2.0**k)
        else:
            cand = box if k == 0 else box.scaled(2.0**k)
        xs = [cand.x0_lo] + [b for b in v.breakpoints if cand.x0_lo < b < cand.x0_hi] + [cand.x0_hi]
        ys = [cand.y0_lo] + [q for q in H.breakpoints if cand.y0_lo < q < cand.y0_hi] + [cand.y0_hi]
        xa = np.asarray(xs)
        ya = np.asarray(ys)
        S = v.eval_many(xa)[:, None] - t * H.eval_many(ya)[None, :] + np.outer(x - xa, ya)
        if _edges_monotone(S):
            return _join_level(S)
    raise BoxTooSmallError("box too small")


def hopf_lax(v: PLFunction, H: PLFunction, t: float, x: float) -> float:
    """min_{x0} v(x0) + t*conj(H)((x - x0)/t) for convex H; exact.

    The minimand is piecewise linear in x0 and +inf outside a compact
    window, so its kinks (images of the conjugate's vertices, plus the
    kinks of v) carry the minimum.  Vertex candidates are evaluated in
    slope space to keep boundary values from rounding out of the domain.
    """
    if t < 0.0:
        raise ProblemError("time must be nonnegative")
    if t == 0.0:
        return v.eval(x)
    Hstar = conjugate(H)
    qs, ws = Hstar.vertices()
    best = min(v.eval(x - t * q) + t * w for q, w in zip(qs, ws))
    for x0 in v.breakpoints:
        w = Hstar.eval((x - x0) / t)
        if math.isfinite(w):
            best = min(best, v.eval(x0) + t * w)
    return best


def hopf_conj(v: PLFunction, H: PLFunction, t: float, x: float) -> float:
    """(conj(v) + t*H) conjugated back, at x, for convex v; exact.

    The maximand y -> x*y - conj(v)(y) - t*H(y) is piecewise linear on the
    compact domain of conj(v), so its vertices and the breakpoints of H
    inside the domain carry the maximum.
    """
    if t < 0.0:
        raise ProblemError("time must be nonnegative")
    vstar = conjugate(v)
    ys, ws = vstar.vertices()
    lo, hi = vstar.domain
    cand = list(zip(ys, ws))
    for q in H.breakpoints:
        if lo < q < hi:
            cand.append((q, vstar.eval(q)))
    return max(x * y - w - t * H.eval(y) for y, w in cand)


def minmax_step(
    v: PLFunction,
    H: PLFunction,
    tau: float,
    report: dict | None = None,
) -> PLFunction:
    """One-step minmax operator: the full profile x -> R^tau v(x).

    The profile is a continuous selection among finitely many lines: the
    transported pieces of v and, per kink, one line for each breakpoint of
    H inside the jump.  Pass values at sample points come from minmax_exact,
    so each sample identifies its line by value alone, and the selection's
    breakpoints are recovered as exact line intersections.  Samples that
    match no line are kept raw and counted in report["unsnapped"].
    """
    if tau < 0.0 or not math.isfinite(tau):
        raise ProblemError("step must be nonnegative and finite")
    v = v.normalized()
    if tau == 0.0:
        return v
    lines: list[tuple[float, float]] = []
    anchors = [v.breakpoints[0]] + list(v.breakpoints)
    for p, xa in zip(v.all_slopes, anchors):
        lines.append((p, v.eval(xa) - p * xa - tau * H.eval(p)))
    for xbar, pl, pr in v.kinks():
        lo, hi = min(pl, pr), max(pl, pr)
        for q in H.breakpoints:
            if lo < q < hi:
                lines.append((q, v.eval(xbar) - q * xbar - tau * H.eval(q)))
    dedup: list[tuple[float, float]] = []
    for ln in lines:
        if not any(abs(ln[0] - m[0]) <= 1e-12 and abs(ln[1] - m[1]) <= 1e-12 for m in dedup):
            dedup.append(ln)
    lines = dedup

    # the profile is a selection among `lines`, so it can only switch where
    # two of them cross; sampling one midpoint per crossing gap is complete
    marks = set(v.breakpoints)
    for xbar, pl, pr in v.kinks():
        lo, hi = min(pl, pr), max(pl, pr)
        qs = [lo] + [q for q in H.breakpoints if lo < q < hi] + [hi]
        for a, b in zip(qs, qs[1:]):
            s = (H.eval(b) - H.eval(a)) / (b - a) if b > a else H.slope_at(a)
            marks.add(xbar + tau * s)
    lo_x = min(marks) - 1.0
    hi_x = max(marks) + 1.0
    samples = set(marks)
    samples.update((lo_x, hi_x))
    for i in range(len(lines)):
        s0, c0 = lines[i]
        for s1, c1 in lines[i + 1 :]:
            if abs(s1 - s0) > 1e-12:
                xc = (c0 - c1) / (s1 - s0)
                if lo_x < xc < hi_x:
                    samples.add(xc)
    xs = sorted(samples)
    mids = [0.5 * (a + b) for a, b in zip(xs, xs[1:])]
    xs = sorted(set(xs) | set(mids))

    hs = H.all_slopes
    convex_H = all(b - a >= -1e-12 for a, b in zip(hs, hs[1:]))
    if convex_H:
        # closed-form pass value: candidates are the conjugate's vertices
        # and the kinks of v; exact for convex H and much cheaper than the
        # grid sweep when H carries many breakpoints
        Hstar = conjugate(H)
        q_arr, w_arr = (np.asarray(a, dtype=float) for a in Hstar.vertices())
        vb_arr = np.asarray(v.breakpoints, dtype=float)
        dom_lo, dom_hi = Hstar.domain

        def exact_value(xq: float) -> float:
            vals = v.eval_many(xq - tau * q_arr) + tau * w_arr
            best = float(vals.min())
            z = (xq - vb_arr) / tau
            inside = (z >= dom_lo) & (z <= dom_hi)
            if bool(np.any(inside)):
                wz = Hstar.core.eval_many(z[inside])
                best = min(best, float((v.eval_many(vb_arr[inside]) + tau * wz).min()))
            return best

    else:

        def exact_value(xq: float) -> float:
            return minmax_exact(v, H, tau, xq)

    slope_arr = np.asarray([s for s, _ in lines])
    const_arr = np.asarray([c for _, c in lines])
    cache: dict[float, tuple[int | None, float]] = {}

    def label_at(xq: float) -> tuple[int | None, float]:
        if xq not in cache:
            raw = exact_value(xq)
            gaps = np.abs(slope_arr * xq + const_arr - raw)
            j = int(np.argmin(gaps))
            snap = 1e-9 * (1.0 + abs(raw))
            cache[xq] = ((j if gaps[j] <= snap else None), raw)
        return cache[xq]

    def assemble(points_x: list[float]) -> PLFunction:
        # breakpoints appear as exact intersections of consecutive labels;
        # a crossing is kept when it advances past the last emitted node, so
        # mislabeled samples near a crossing cannot suppress it
        pts: list[tuple[float, float]] = []
        prev_label: int | None = None
        for xq in points_x:
            j, raw = label_at(xq)
            if j is None:
                pts.append((xq, raw))
                prev_label = None
                continue
            if prev_label is not None and j != prev_label:
                s0, c0 = lines[prev_label]
                s1, c1 = lines[j]
                if abs(s1 - s0) > 1e-12:
                    xc = (c0 - c1) / (s1 - s0)
                    lower = pts[-1][0] if pts else points_x[0]
                    if lower - 1e-9 <= xc <= xq + 1e-9:
                        pts.append((xc, s1 * xc + c1))
            prev_label = j
        jl, raw_l = label_at(points_x[0])
        jr, raw_r = label_at(points_x[-1])
        left_slope = lines[jl][0] if jl is not None else None
        right_slope = lines[jr][0] if jr is not None else None
        if not pts:
            if jl is not None and jr is not None and jl == jr:
                s, c = lines[jl]
                return PLFunction.affine(s, 0.0, c)
            pts = [(points_x[0], raw_l), (points_x[-1], raw_r)]
        dd: list[tuple[float, float]] = []
        for px, py in sorted(pts):
            if dd and px - dd[-1][0] <= 1e-11:
                continue
            dd.append((px, py))
        return PLFunction.from_points(dd, left_slope, right_slope).normalized()

    prof = assemble(xs)
    # verification sweep between reconstructed nodes: the profile must match
    # the exact pass value at every probe
    for _ in range(2):
        probes = set()
        bps = (lo_x,) + prof.breakpoints + (hi_x,)
        for a, b in zip(bps, bps[1:]):
            if b - a > 1e-9:
                probes.add(0.5 * (a + b))
        extra = []
        for xq in sorted(probes):
            j, raw = label_at(xq)
            if j is None:
                bad = abs(prof.eval(xq) - raw) > 1e-9 * (1.0 + abs(raw))
            else:
                s, c = lines[j]
                bad = abs(prof.eval(xq) - (s * xq + c)) > 1e-9
            if bad:
                extra.append(xq)
        if not extra:
            break
        enriched = set(xs) | set(extra)
        for xq in extra:
            i = bisect_left(xs, xq)
            if 0 < i < len(xs):
                enriched.add(0.5 * (xs[i - 1] + xq))
                enriched.add(0.5 * (xq + xs[i]))
        xs = sorted(enriched)
        prof = assemble(xs)
    if report is not None:
        report["unsnapped"] = sum(1 for j, _ in cache.values() if j is None)
        report["lines"] = lines
    return prof
