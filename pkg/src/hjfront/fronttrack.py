"""Exact evolution of piecewise linear profiles by front tracking.

The solution of u_t + H(u_x) = 0 with piecewise linear u(0, .) = v and
piecewise linear H stays piecewise linear in x for all time.  Each affine
piece u = p*x - H(p)*t + c is transported unchanged; pieces are separated
by straight shock lines whose speeds are chords of H.  Kinks of v open
into Riemann fans at t = 0, and colliding shocks are resolved by a fresh
fan at the collision point.  Between consecutive events the whole picture
is static, so the evolution is exact up to floating point rounding.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import CollisionBudgetError, ProblemError
from .piecewise import PLFunction
from .riemann import entropy_ok, solve_fan

EVENT_TOL = 1e-10
PARALLEL_TOL = 1e-12


@dataclass
class Piece:
    """One affine region u(t, x) = slope*x - hval*t + const."""

    slope: float
    const: float
    hval: float

    def line(self, t: float, x: float) -> float:
        return self.slope * x - self.hval * t + self.const


@dataclass
class Shock:
    """Straight discontinuity line x(t) = born_x + speed*(t - born_t)."""

    born_t: float
    born_x: float
    speed: float
    died_t: float | None = None

    def position(self, t: float) -> float:
        return self.born_x + self.speed * (t - self.born_t)


@dataclass
class Event:
    t: float
    x: float
    kind: str  # "fan" | "collision" | "merge"
    shocks_in: tuple[int, ...]
    shocks_out: tuple[int, ...]


@dataclass
class Epoch:
    """Static shock configuration valid from t_start to the next event.

    pieces lists piece ids left to right; shocks separates them, so
    len(pieces) == len(shocks) + 1.
    """

    t_start: float
    pieces: tuple[int, ...]
    shocks: tuple[int, ...]


@dataclass
class FrontTrace:
    v: PLFunction
    H: PLFunction
    t_max: float
    pieces: list[Piece] = field(default_factory=list)
    shocks: list[Shock] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    epochs: list[Epoch] = field(default_factory=list)
    collisions: int = 0

    # -- lookup ------------------------------------------------------------

    def epoch_at(self, t: float) -> Epoch:
        if t < -EVENT_TOL:
            raise ProblemError("time must be nonnegative")
        starts = [ep.t_start for ep in self.epochs]
        i = bisect_right(starts, t + EVENT_TOL) - 1
        return self.epochs[max(i, 0)]

    def shock_positions(self, t: float) -> list[float]:
        ep = self.epoch_at(t)
        return [self.shocks[i].position(t) for i in ep.shocks]

    def _region(self, ep: Epoch, t: float, x: float) -> int:
        lo, hi = 0, len(ep.shocks)
        while lo < hi:
            mid = (lo + hi) // 2
            if x < self.shocks[ep.shocks[mid]].position(t):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def eval(self, t: float, x: float) -> float:
        ep = self.epoch_at(t)
        return self.pieces[ep.pieces[self._region(ep, t, x)]].line(t, x)

    def slope_at(self, t: float, x: float) -> float:
        ep = self.epoch_at(t)
        return self.pieces[ep.pieces[self._region(ep, t, x)]].slope

    def profile(self, t: float) -> PLFunction:
        """The x-profile u(t, .) as a PLFunction."""
        ep = self.epoch_at(t)
        if not ep.shocks:
            pc = self.pieces[ep.pieces[0]]
            return PLFunction.affine(pc.slope, 0.0, pc.line(t, 0.0))
        pts: list[tuple[float, float]] = []
        for k, sid in enumerate(ep.shocks):
            x = self.shocks[sid].position(t)
            if pts and x - pts[-1][0] <= EVENT_TOL:
                continue  # newborn fan, shocks not yet separated
            pts.append((x, self.pieces[ep.pieces[k + 1]].line(t, x)))
        left = self.pieces[ep.pieces[0]].slope
        right = self.pieces[ep.pieces[-1]].slope
        return PLFunction.from_points(pts, left, right).normalized()

    # -- diagnostics -------------------------------------------------------

    def check_invariants(self, tol: float = 1e-9) -> None:
        """Raise AssertionError when the trace violates a structural law."""
        alphabet = set(self.v.all_slopes) | set(self.H.breakpoints)
        for pc in self.pieces:
            assert any(abs(pc.slope - a) <= 1e-9 for a in alphabet), pc.slope
        for ep, nxt in zip(self.epochs, self.epochs[1:] + [None]):
            t_end = self.t_max if nxt is None else nxt.t_start
            assert len(ep.pieces) == len(ep.shocks) + 1
            t_mid = 0.5 * (ep.t_start + t_end)
            pos = [self.shocks[i].position(t_mid) for i in ep.shocks]
            assert all(a <= b + tol for a, b in zip(pos, pos[1:]))
            for k, sid in enumerate(ep.shocks):
                sh = self.shocks[sid]
                pl = self.pieces[ep.pieces[k]]
                pr = self.pieces[ep.pieces[k + 1]]
                dp = pr.slope - pl.slope
                assert abs(dp) > PARALLEL_TOL
                # Rankine-Hugoniot: speed equals the chord of H over the jump
                assert abs(sh.speed - (pr.hval - pl.hval) / dp) <= tol
                # continuity across the shock
                x = sh.position(t_mid)
                assert abs(pl.line(t_mid, x) - pr.line(t_mid, x)) <= tol
                assert entropy_ok(pl.slope, pr.slope, self.H)


def _new_piece(trace: FrontTrace, slope: float, const: float) -> int:
    trace.pieces.append(Piece(slope, const, trace.H.eval(slope)))
    return len(trace.pieces) - 1


def _fan_pieces_and_shocks(
    trace: FrontTrace, fan, t0: float, x0: float, u0: float
) -> tuple[list[int], list[int]]:
    """Interior piece ids and shock ids for a nontrivial fan anchored at
    (t0, x0) where the solution takes the value u0."""
    interior = []
    for q in fan.slopes[1:-1]:
        const = u0 - q * x0 + trace.H.eval(q) * t0
        interior.append(_new_piece(trace, q, const))
    shock_ids = []
    for s in fan.speeds:
        trace.shocks.append(Shock(t0, x0, s))
        shock_ids.append(len(trace.shocks) - 1)
    return interior, shock_ids


def _init_epoch(trace: FrontTrace) -> None:
    v, H = trace.v, trace.H
    xs = v.breakpoints
    slopes = v.all_slopes
    anchors = [xs[0]] + list(xs)  # an anchor point inside each piece
    piece_ids = []
    for p, xa in zip(slopes, anchors):
        piece_ids.append(_new_piece(trace, p, v.eval(xa) - p * xa))

    pieces = [piece_ids[0]]
    shocks: list[int] = []
    for i, xbar in enumerate(xs):
        p_minus, p_plus = slopes[i], slopes[i + 1]
        if abs(p_plus - p_minus) <= PARALLEL_TOL:
            continue
        fan = solve_fan(p_minus, p_plus, H, apex=(0.0, xbar))
        interior, new_shocks = _fan_pieces_and_shocks(trace, fan, 0.0, xbar, v.eval(xbar))
        pieces.extend(interior + [piece_ids[i + 1]])
        shocks.extend(new_shocks)
        trace.events.append(Event(0.0, xbar, "fan", (), tuple(new_shocks)))
    trace.epochs.append(Epoch(0.0, tuple(pieces), tuple(shocks)))


def _next_events(trace: FrontTrace) -> list[tuple[float, float, int, int]]:
    """Earliest upcoming collision groups in the current epoch.

    Returns a list of (t, x, i, j) where shocks i..j (epoch indices) meet
    at (t, x); empty when nothing happens before t_max.
    """
    ep = trace.epochs[-1]
    t0 = ep.t_start
    crossings = []  # (t, x, pair index k) for shocks k and k+1
    for k in range(len(ep.shocks) - 1):
        a = trace.shocks[ep.shocks[k]]
        b = trace.shocks[ep.shocks[k + 1]]
        ds = a.speed - b.speed
        if ds <= PARALLEL_TOL:
            continue  # separating or parallel
        ia = a.born_x - a.speed * a.born_t
        ib = b.born_x - b.speed * b.born_t
        tc = (ib - ia) / ds
        if tc < t0 - 1e-9 or tc > trace.t_max + EVENT_TOL:
            continue
        tc = max(tc, t0)
        crossings.append((tc, a.position(tc), k))
    if not crossings:
        return []
    t_star = min(c[0] for c in crossings)
    live = [c for c in crossings if c[0] <= t_star + EVENT_TOL]
    live.sort(key=lambda c: c[2])

    groups: list[tuple[float, float, int, int]] = []
    for tc, xc, k in live:
        if groups and k <= groups[-1][3] + 1 and abs(xc - groups[-1][1]) <= EVENT_TOL:
            t_old, x_old, i, _ = groups[-1]
            groups[-1] = (min(t_old, tc), x_old, i, k + 1)
        else:
            groups.append((tc, xc, k, k + 1))
    # absorb neighbours that pass through the same point
    widened = []
    for tc, xc, i, j in groups:
        while i > 0 and abs(trace.shocks[ep.shocks[i - 1]].position(tc) - xc) <= EVENT_TOL:
            i -= 1
        while j < len(ep.shocks) - 1 and abs(
            trace.shocks[ep.shocks[j + 1]].position(tc) - xc
        ) <= EVENT_TOL:
            j += 1
        if widened and i <= widened[-1][3]:
            t_old, x_old, i_old, _ = widened[-1]
            widened[-1] = (min(t_old, tc), x_old, i_old, j)
        else:
            widened.append((tc, xc, i, j))
    return widened


def _resolve(trace: FrontTrace, budget: int) -> bool:
    """Apply the earliest collision groups; False when the epoch is final."""
    groups = _next_events(trace)
    if not groups:
        return False
    ep = trace.epochs[-1]
    t_star = min(g[0] for g in groups)
    pieces = list(ep.pieces)
    shocks = list(ep.shocks)
    for tc, xc, i, j in sorted(groups, key=lambda g: -g[2]):
        trace.collisions += 1
        if trace.collisions > budget:
            raise CollisionBudgetError("collision budget exceeded")
        dead = tuple(shocks[i : j + 1])
        for sid in dead:
            trace.shocks[sid].died_t = tc
        pl = trace.pieces[pieces[i]]
        pr = trace.pieces[pieces[j + 1]]
        u0 = pl.line(tc, xc)
        if abs(pr.line(tc, xc) - u0) > 1e-7 * max(1.0, abs(u0)):
            raise ProblemError("discontinuous collision state")
        if abs(pr.slope - pl.slope) <= PARALLEL_TOL:
            # outer pieces continue each other: drop the interior entirely
            pieces[i : j + 2] = [pieces[i]]
            shocks[i : j + 1] = []
            trace.events.append(Event(tc, xc, "merge", dead, ()))
            continue
        fan = solve_fan(pl.slope, pr.slope, trace.H, apex=(tc, xc))
        interior, born = _fan_pieces_and_shocks(trace, fan, tc, xc, u0)
        pieces[i + 1 : j + 1] = interior
        shocks[i : j + 1] = born
        trace.events.append(Event(tc, xc, "collision", dead, tuple(born)))
    trace.epochs.append(Epoch(t_star, tuple(pieces), tuple(shocks)))
    return True


def front_track(
    v: PLFunction,
    H: PLFunction,
    t_max: float,
    max_collisions: int | None = None,
) -> FrontTrace:
    """Evolve the initial profile v under u_t + H(u_x) = 0 up to t_max."""
    if not math.isfinite(t_max) or t_max < 0.0:
        raise ProblemError("t_max must be finite and nonnegative")
    v = v.normalized()
    H = H.normalized()
    if max_collisions is None:
        max_collisions = 10 * (len(v.kinks()) * len(H.breakpoints) + 100)
    trace = FrontTrace(v, H, t_max)
    _init_epoch(trace)
    while _resolve(trace, max_collisions):
        pass
    return trace
