"""Single-kink (Riemann) problems for u_t + H(u_x) = 0 with PL data.

A jump from slope p_minus to p_plus at an apex resolves into a fan of
constant-slope regions separated by straight shock lines.  The fan slopes are
the vertices of the convex envelope of H on [p_minus, p_plus] when
p_minus < p_plus, of the concave envelope traversed downward otherwise; the
shock speeds are the chords of H between consecutive fan slopes.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .errors import ProblemError
from .piecewise import PLFunction, envelope

# speeds closer than this are merged into a single shock
SPEED_TOL = 1e-12


@dataclass(frozen=True)
class RiemannFan:
    """Resolved jump: slopes from the left state to the right state.

    speeds[i] is the speed of the shock separating slopes[i] and slopes[i+1];
    len(speeds) == len(slopes) - 1, and speeds increase strictly.  A trivial
    fan (no jump) has a single slope and no speeds.
    """

    apex: tuple[float, float]  # (t0, x0)
    slopes: tuple[float, ...]
    speeds: tuple[float, ...]
    kind: str  # "convex" | "concave" | "trivial"

    def __post_init__(self) -> None:
        if len(self.slopes) == 0:
            raise ProblemError("a fan needs at least one slope")
        if len(self.speeds) != len(self.slopes) - 1:
            raise ProblemError("fan speed/slope count mismatch")
        for s0, s1 in zip(self.speeds, self.speeds[1:]):
            if not s0 < s1:
                raise ProblemError(f"fan speeds not strictly increasing: {s0} >= {s1}")

    @property
    def trivial(self) -> bool:
        return len(self.slopes) == 1

    def to_json_dict(self) -> dict:
        return {
            "apex": list(self.apex),
            "slopes": list(self.slopes),
            "speeds": list(self.speeds),
            "kind": self.kind,
        }


def _merge_close_speeds(
    slopes: list[float], H: PLFunction
) -> tuple[list[float], list[float]]:
    """Chord speeds between consecutive slopes; drop interior slopes whose
    adjacent chords are closer than SPEED_TOL."""
    while True:
        speeds = [
            (H.eval(q1) - H.eval(q0)) / (q1 - q0) for q0, q1 in zip(slopes, slopes[1:])
        ]
        merged = False
        for i in range(len(speeds) - 1):
            if speeds[i + 1] - speeds[i] <= SPEED_TOL:
                del slopes[i + 1]
                merged = True
                break
        if not merged:
            return slopes, speeds


def solve_fan(
    p_minus: float, p_plus: float, H: PLFunction, apex: tuple[float, float] = (0.0, 0.0)
) -> RiemannFan:
    """Resolve the jump (p_minus left, p_plus right) at the given apex."""
    if p_minus == p_plus:
        return RiemannFan(apex, (p_minus,), (), "trivial")
    if p_minus < p_plus:
        env = envelope(H, p_minus, p_plus, "convex")
        slopes = list(env.breakpoints)
        kind = "convex"
    else:
        env = envelope(H, p_plus, p_minus, "concave")
        slopes = list(reversed(env.breakpoints))
        kind = "concave"
    slopes, speeds = _merge_close_speeds(slopes, H)
    return RiemannFan(apex, tuple(slopes), tuple(speeds), kind)


def fan_eval(fan: RiemannFan, H: PLFunction, v_apex: float, t: float, x: float) -> float:
    """Value of the fan solution at (t, x); v_apex is the datum value at the apex."""
    t0, x0 = fan.apex
    tau = t - t0
    if tau < -SPEED_TOL:
        raise ProblemError(f"fan evaluated before its apex time: {t} < {t0}")
    xi = x - x0
    if fan.trivial:
        p = fan.slopes[0]
        return v_apex + p * xi - tau * H.eval(p)
    if tau <= 0.0:
        p = fan.slopes[0] if xi <= 0.0 else fan.slopes[-1]
        return v_apex + p * xi
    rays = [s * tau for s in fan.speeds]
    i = bisect_left(rays, xi)
    p = fan.slopes[i]
    return v_apex + p * xi - tau * H.eval(p)


def entropy_ok(p_minus: float, p_plus: float, H: PLFunction, strict: bool = False) -> bool:
    """Oleinik condition for the jump: the graph of H over the jump interval
    lies above the chord when p_minus < p_plus, below it when p_minus > p_plus.
    With strict=True the inequality must be strict at every breakpoint of H
    interior to the jump."""
    if p_minus == p_plus:
        raise ProblemError("not a jump: p_minus == p_plus")
    lo, hi = min(p_minus, p_plus), max(p_minus, p_plus)
    h_lo, h_hi = H.eval(lo), H.eval(hi)
    chord_slope = (h_hi - h_lo) / (hi - lo)
    sign = 1.0 if p_minus < p_plus else -1.0  # required sign of H - chord
    tol = SPEED_TOL * max(1.0, abs(h_lo), abs(h_hi))
    for q in H.breakpoints:
        if lo + SPEED_TOL < q < hi - SPEED_TOL:
            gap = sign * (H.eval(q) - (h_lo + chord_slope * (q - lo)))
            if strict:
                if gap <= tol:
                    return False
            elif gap < -tol:
                return False
    return True
