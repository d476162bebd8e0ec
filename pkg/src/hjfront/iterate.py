"""Iterated variational stepping over time subdivisions.

The one-step operator (grid engine: minmax_step; exact engine: a
front-tracking restart) is composed over consecutive intervals of a
subdivision of [0, T].  The module measures convergence of the
composite profiles toward the event-driven reference, follows kink
trajectories across steps, and classifies large shocks by whether
their measured speed is tangent to a characteristic speed on one side
(contact) or strictly between the one-sided speeds (ordinary).
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass

from .errors import NumericalError, ProblemError
from .fronttrack import front_track
from .minmax import minmax_step
from .piecewise import MERGE_TOL, PLFunction, sup_diff_on

ENGINES = ("exact-riemann", "grid")


@dataclass(frozen=True)
class Subdivision:
    """Strictly increasing times 0 = t_0 < t_1 < ... < t_n = T."""

    times: tuple[float, ...]

    def __post_init__(self):
        ts = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", ts)
        if len(ts) < 2:
            raise ProblemError("subdivision needs at least two times")
        if ts[0] != 0.0:
            raise ProblemError("subdivision must start at 0")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ProblemError("subdivision times must be strictly increasing")

    @property
    def horizon(self) -> float:
        return self.times[-1]

    @property
    def mesh(self) -> float:
        return max(b - a for a, b in zip(self.times, self.times[1:]))

    def index_of(self, s: float) -> int:
        """Largest i with t_i <= s < t_{i+1}; total on [0, horizon)."""
        if not 0.0 <= s < self.horizon:
            raise ProblemError("query time outside [0, horizon)")
        return bisect.bisect_right(self.times, s) - 1

    @staticmethod
    def uniform(T: float, n: int) -> "Subdivision":
        if n < 1 or T <= 0:
            raise ProblemError("need n >= 1 steps and T > 0")
        return Subdivision(tuple(T * k / n for k in range(n + 1)))

    def refined_with(self, extra) -> "Subdivision":
        ts = sorted(set(self.times) | {float(t) for t in extra})
        merged = [ts[0]]
        for t in ts[1:]:
            if t - merged[-1] > 1e-12:
                merged.append(t)
        if abs(merged[-1] - self.horizon) > 1e-12:
            raise ProblemError("extra times must lie within [0, horizon]")
        merged[-1] = self.horizon
        return Subdivision(tuple(merged))


@dataclass(frozen=True)
class ShockSample:
    t: float
    x: float
    left_slope: float
    right_slope: float


@dataclass(frozen=True)
class ShockPath:
    """A kink trajectory matched step to step; may end before horizon."""

    points: tuple[ShockSample, ...]
    rh_residuals: tuple[float, ...] = ()

    @property
    def born(self) -> float:
        return self.points[0].t

    @property
    def last_seen(self) -> float:
        return self.points[-1].t


@dataclass(frozen=True)
class ShockVerdict:
    path: ShockPath
    rh_ok: bool
    is_contact: bool
    side: str | None
    max_rh_residual: float
    max_contact_residual: float


@dataclass(frozen=True)
class IterationTrace:
    subdivision: Subdivision
    engine: str
    profiles: tuple[PLFunction, ...]
    grids: tuple[tuple[float, ...], ...]
    shocks: tuple[ShockPath, ...]
    reference_errors: tuple[float, ...] | None = None


def _sup_abs_H(H: PLFunction, L: float) -> float:
    qs = [-L, L] + [q for q in H.breakpoints if -L <= q <= L]
    return max(abs(H.eval(q)) for q in qs)


def iterated_minmax(
    v: PLFunction,
    H: PLFunction,
    zeta: Subdivision,
    engine: str = "exact-riemann",
) -> IterationTrace:
    """Compose the one-step operator over the intervals of zeta."""
    if engine not in ENGINES:
        raise ProblemError(f"engine must be one of {ENGINES}")
    profiles = [v.normalized()]
    lip0 = profiles[0].lipschitz
    for a, b in zip(zeta.times, zeta.times[1:]):
        dt = b - a
        cur = profiles[-1]
        if engine == "exact-riemann":
            nxt = front_track(cur, H, dt).profile(dt)
        else:
            nxt = minmax_step(cur, H, dt)
        nxt = nxt.normalized()
        if nxt.lipschitz > lip0 + 1e-9:
            raise NumericalError("slope bound grew across a step")
        profiles.append(nxt)
    paths = _match_paths(profiles, zeta.times, H)
    return IterationTrace(
        subdivision=zeta,
        engine=engine,
        profiles=tuple(profiles),
        grids=tuple(p.breakpoints for p in profiles),
        shocks=paths,
    )


def _kink_list(u: PLFunction, min_jump: float):
    return [k for k in u.kinks() if abs(k[2] - k[1]) >= max(min_jump, MERGE_TOL)]


def _match_paths(
    profiles, times, H: PLFunction, min_jump: float = 0.0
) -> tuple[ShockPath, ...]:
    """Order-preserving nearest matching with a speed-limited window.

    Shocks of a single profile family cannot cross between steps (they
    would collide first), so a monotone two-pointer merge is exact up
    to the window slack; unmatched kinks record births and deaths.
    """
    done: list[tuple[ShockSample, ...]] = []
    active: list[list[ShockSample]] = []
    for t, u in zip(times, profiles):
        kinks = _kink_list(u, min_jump)
        win = 0.0
        if active:
            win = H.lipschitz * (t - active[0][-1].t) + 1e-7
        nxt: list[list[ShockSample]] = []
        i = j = 0
        while i < len(active) and j < len(kinks):
            xa = active[i][-1].x
            xb, pl, pr = kinks[j]
            if abs(xb - xa) <= win:
                active[i].append(ShockSample(t, xb, pl, pr))
                nxt.append(active[i])
                i += 1
                j += 1
            elif xa < xb:
                done.append(tuple(active[i]))
                i += 1
            else:
                nxt.append([ShockSample(t, xb, pl, pr)])
                j += 1
        for path in active[i:]:
            done.append(tuple(path))
        for xb, pl, pr in kinks[j:]:
            nxt.append([ShockSample(t, xb, pl, pr)])
        active = nxt
    done.extend(tuple(p) for p in active)
    done.sort(key=lambda p: (p[0].t, p[0].x))
    return tuple(ShockPath(points=p) for p in done)


def _chord(H: PLFunction, pa: float, pb: float) -> float:
    if abs(pb - pa) <= MERGE_TOL:
        return H.slope_at(pa)
    return (H.eval(pb) - H.eval(pa)) / (pb - pa)


def extract_shocks(
    trace: IterationTrace, H: PLFunction, min_jump: float = 0.0
) -> tuple[ShockPath, ...]:
    """Kink trajectories annotated with per-step speed residuals.

    residual_k compares the finite-difference speed over [t_k, t_{k+1}]
    with the jump-chord speed of H across the kink; the chord is taken
    at whichever interval endpoint agrees better, because a fan birth or
    a merge inside the interval changes which jump the speed belongs to.
    """
    paths = _match_paths(
        trace.profiles, trace.subdivision.times, H, min_jump=min_jump
    )
    out = []
    for p in paths:
        res = []
        for a, b in zip(p.points, p.points[1:]):
            speed = (b.x - a.x) / (b.t - a.t)
            res.append(
                min(
                    abs(speed - _chord(H, a.left_slope, a.right_slope)),
                    abs(speed - _chord(H, b.left_slope, b.right_slope)),
                )
            )
        out.append(ShockPath(points=p.points, rh_residuals=tuple(res)))
    return tuple(out)


def contact_shock_check(
    trace: IterationTrace,
    H: PLFunction,
    tol: float,
    min_jump: float = 0.0,
) -> tuple[ShockVerdict, ...]:
    """Classify each extracted shock as contact or ordinary.

    A contact shock's measured speed is tangent to the one-sided
    characteristic speed on at least one flank; an ordinary entropic
    shock only balances the jump chord.
    """
    verdicts = []
    for p in extract_shocks(trace, H, min_jump=min_jump):
        if len(p.points) < 2:
            continue
        # intervals where the jump endpoints drift by more than a quarter
        # of the jump belong to a birth or merge transient, not to the
        # established wave the tangency test is about
        pairs = list(zip(p.points, p.points[1:]))
        steady = [
            (a, b)
            for a, b in pairs
            if abs(b.left_slope - a.left_slope)
            <= 0.25 * abs(a.left_slope - a.right_slope)
            and abs(b.right_slope - a.right_slope)
            <= 0.25 * abs(a.left_slope - a.right_slope)
        ]
        if not steady:
            steady = pairs
        contact = 0.0
        lefts = 0
        for a, b in steady:
            speed = (b.x - a.x) / (b.t - a.t)
            left = abs(speed - H.slope_at(a.left_slope))
            right = abs(speed - H.slope_at(a.right_slope))
            contact = max(contact, min(left, right))
            lefts += left <= right
        rh = max(p.rh_residuals)
        side = None
        if contact <= tol:
            side = "left" if 2 * lefts >= len(steady) else "right"
        verdicts.append(
            ShockVerdict(
                path=p,
                rh_ok=rh <= tol,
                is_contact=(contact <= tol and rh <= tol),
                side=side,
                max_rh_residual=rh,
                max_contact_residual=contact,
            )
        )
    return tuple(verdicts)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    mesh: float
    sup_error: float
    bound: float


@dataclass(frozen=True)
class ConvergenceStudy:
    rows: tuple[ConvergenceRow, ...]
    collision_count: int
    sup_abs_H: float


def convergence_study(
    v: PLFunction,
    H: PLFunction,
    T: float,
    ns,
    engine: str = "exact-riemann",
) -> ConvergenceStudy:
    """Sup-error of n-step composites against the tracked reference.

    bound column: 2 * collisions * max|H| over the invariant slope
    band * mesh, the a-priori deviation budget of the composite.
    """
    ns = list(ns)
    if any(b <= a for a, b in zip(ns, ns[1:])) or not ns:
        raise ProblemError("ns must be a non-empty increasing sequence")
    ref_trace = front_track(v, H, T)
    ref = ref_trace.profile(T)
    k = ref_trace.collisions
    hmax = _sup_abs_H(H, v.lipschitz)
    lo = min(v.breakpoints[0], ref.breakpoints[0]) - 1.0
    hi = max(v.breakpoints[-1], ref.breakpoints[-1]) + 1.0
    rows = []
    for n in ns:
        zeta = Subdivision.uniform(T, n)
        tr = iterated_minmax(v, H, zeta, engine=engine)
        err = sup_diff_on(tr.profiles[-1], ref, lo, hi)
        rows.append(
            ConvergenceRow(
                n=n, mesh=zeta.mesh, sup_error=err, bound=2 * k * hmax * zeta.mesh
            )
        )
    return ConvergenceStudy(rows=tuple(rows), collision_count=k, sup_abs_H=hmax)
