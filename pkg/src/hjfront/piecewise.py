"""Continuous piecewise linear functions on the real line.

A PLFunction is stored as a finite list of breakpoints with values plus two
tail slopes, so every function here is globally defined and globally
Lipschitz.  ExtendedPL restricts a PLFunction to a finite interval and is
+infinity outside; conjugation maps one representation to the other.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConvexityError, EmptyIntervalError, ProblemError

# Breakpoints closer than this are considered duplicates; adjacent slopes
# closer than this are considered collinear.
MERGE_TOL = 1e-12


@dataclass(frozen=True)
class SlopeInterval:
    """Closed interval [lo, hi] of slopes (Clarke differential)."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo <= self.hi):
            raise ProblemError(f"slope interval endpoints out of order: {self.lo} > {self.hi}")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, s: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= s <= self.hi + tol

    def distance(self, s: float) -> float:
        """Distance from s to the interval (0 if inside)."""
        if s < self.lo:
            return self.lo - s
        if s > self.hi:
            return s - self.hi
        return 0.0


@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise linear function with affine tails.

    breakpoints are strictly increasing; values[i] = f(breakpoints[i]);
    left_slope/right_slope extend the function affinely beyond the first and
    last breakpoint.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    left_slope: float
    right_slope: float

    def __post_init__(self) -> None:
        bps, vals = self.breakpoints, self.values
        if len(bps) == 0:
            raise ProblemError("a PLFunction needs at least one breakpoint")
        if len(bps) != len(vals):
            raise ProblemError(f"{len(bps)} breakpoints vs {len(vals)} values")
        for seq in (bps, vals, (self.left_slope, self.right_slope)):
            for z in seq:
                if not math.isfinite(z):
                    raise ProblemError("non-finite data in PLFunction")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ProblemError("breakpoints must be strictly increasing")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_points(
        cls,
        points: Iterable[tuple[float, float]],
        left_slope: float | None = None,
        right_slope: float | None = None,
    ) -> "PLFunction":
        """Interpolate the given (x, y) points; tails default to the end slopes."""
        pts = sorted(points)
        xs = tuple(p[0] for p in pts)
        ys = tuple(p[1] for p in pts)
        if len(xs) < 2 and (left_slope is None or right_slope is None):
            raise ProblemError("tail slopes are required with fewer than two points")
        if left_slope is None:
            left_slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
        if right_slope is None:
            right_slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        return cls(xs, ys, left_slope, right_slope)

    @classmethod
    def affine(cls, slope: float, x0: float = 0.0, y0: float = 0.0) -> "PLFunction":
        return cls((x0,), (y0,), slope, slope)

    # -- basic queries -----------------------------------------------------

    @cached_property
    def interior_slopes(self) -> tuple[float, ...]:
        b, v = self.breakpoints, self.values
        return tuple((v[i + 1] - v[i]) / (b[i + 1] - b[i]) for i in range(len(b) - 1))

    @cached_property
    def all_slopes(self) -> tuple[float, ...]:
        """Tail and piece slopes from left to right."""
        return (self.left_slope,) + self.interior_slopes + (self.right_slope,)

    @property
    def slope_range(self) -> tuple[float, float]:
        s = self.all_slopes
        return (min(s), max(s))

    @property
    def lipschitz(self) -> float:
        return max(abs(s) for s in self.all_slopes)

    def eval(self, x: float) -> float:
        b, v = self.breakpoints, self.values
        i = bisect_left(b, x)
        if i < len(b) and b[i] == x:
            return v[i]
        if i == 0:
            return v[0] + self.left_slope * (x - b[0])
        if i == len(b):
            return v[-1] + self.right_slope * (x - b[-1])
        s = self.interior_slopes[i - 1]
        return v[i - 1] + s * (x - b[i - 1])

    __call__ = eval

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        b = np.asarray(self.breakpoints)
        v = np.asarray(self.values)
        out = np.interp(xs, b, v)
        left = xs < b[0]
        if left.any():
            out = np.where(left, v[0] + self.left_slope * (xs - b[0]), out)
        right = xs > b[-1]
        if right.any():
            out = np.where(right, v[-1] + self.right_slope * (xs - b[-1]), out)
        return out

    def clarke(self, x: float, tol: float = MERGE_TOL) -> SlopeInterval:
        """Clarke differential: [min, max] of the one-sided slopes at x."""
        b = self.breakpoints
        i = bisect_left(b, x - tol)
        if i < len(b) and abs(b[i] - x) <= tol:
            lo = self.all_slopes[i]
            hi = self.all_slopes[i + 1]
            return SlopeInterval(min(lo, hi), max(lo, hi))
        s = self.slope_at(x)
        return SlopeInterval(s, s)

    def slope_at(self, x: float) -> float:
        """Slope of the piece containing x (right-continuous at breakpoints)."""
        b = self.breakpoints
        i = bisect_left(b, x)
        if i < len(b) and b[i] == x:
            i += 1
        if i == 0:
            return self.left_slope
        if i == len(b):
            return self.right_slope
        return self.interior_slopes[i - 1]

    def kinks(self, tol: float = MERGE_TOL) -> list[tuple[float, float, float]]:
        """Genuine kinks as (x, left slope, right slope) with distinct slopes."""
        out = []
        s = self.all_slopes
        for i, x in enumerate(self.breakpoints):
            if abs(s[i + 1] - s[i]) > tol:
                out.append((x, s[i], s[i + 1]))
        return out

    # -- rebuilding --------------------------------------------------------

    def normalized(self) -> "PLFunction":
        """Drop near-duplicate breakpoints and merge collinear pieces."""
        b, v = list(self.breakpoints), list(self.values)
        # duplicate abscissae: keep the first occurrence
        xs, ys = [b[0]], [v[0]]
        for x, y in zip(b[1:], v[1:]):
            if x - xs[-1] <= MERGE_TOL:
                continue
            xs.append(x)
            ys.append(y)
        # drop breakpoints where the slopes on both sides agree
        while len(xs) > 1:
            slopes = [self.left_slope]
            slopes += [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
            slopes.append(self.right_slope)
            drop = None
            for i in range(len(xs)):
                if abs(slopes[i + 1] - slopes[i]) <= MERGE_TOL:
                    drop = i
                    break
            if drop is None:
                break
            del xs[drop], ys[drop]
        if len(xs) == 1 and abs(self.right_slope - self.left_slope) <= MERGE_TOL:
            # affine function: anchor at the origin so equal functions
            # normalize to identical data
            ys[0] = ys[0] - self.left_slope * xs[0]
            xs[0] = 0.0
        return PLFunction(tuple(xs), tuple(ys), self.left_slope, self.right_slope)

    def shifted(self, dx: float = 0.0, dy: float = 0.0) -> "PLFunction":
        return PLFunction(
            tuple(x + dx for x in self.breakpoints),
            tuple(y + dy for y in self.values),
            self.left_slope,
            self.right_slope,
        )

    def scaled(self, c: float) -> "PLFunction":
        """c * f."""
        return PLFunction(
            self.breakpoints, tuple(c * y for y in self.values), c * self.left_slope, c * self.right_slope
        )

    def plus(self, other: "PLFunction") -> "PLFunction":
        """f + g with the merged breakpoint set."""
        xs = sorted(set(self.breakpoints) | set(other.breakpoints))
        ys = tuple(self.eval(x) + other.eval(x) for x in xs)
        return PLFunction(
            tuple(xs), ys, self.left_slope + other.left_slope, self.right_slope + other.right_slope
        )

    # -- norms over compacts ----------------------------------------------

    def _candidates(self, lo: float, hi: float) -> list[float]:
        if not lo <= hi:
            raise EmptyIntervalError(f"empty interval [{lo}, {hi}]")
        cands = [lo, hi]
        for x in self.breakpoints:
            if lo < x < hi:
                cands.append(x)
        return cands

    def max_abs_on(self, lo: float, hi: float) -> float:
        return max(abs(self.eval(x)) for x in self._candidates(lo, hi))

    def to_json_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "values": list(self.values),
            "tails": [self.left_slope, self.right_slope],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PLFunction":
        try:
            tails = data["tails"]
            return cls(tuple(data["breakpoints"]), tuple(data["values"]), tails[0], tails[1])
        except (KeyError, IndexError, TypeError) as exc:
            raise ProblemError(f"malformed PLFunction data: {exc}") from exc


@dataclass(frozen=True)
class ExtendedPL:
    """A PL function finite exactly on [domain[0], domain[1]], +inf outside.

    The core PLFunction carries the breakpoint data; the domain may be a
    single point (the conjugate of an affine function).
    """

    core: PLFunction
    domain: tuple[float, float]

    def __post_init__(self) -> None:
        a, b = self.domain
        if not a <= b:
            raise ProblemError(f"domain endpoints out of order: {a} > {b}")

    def eval(self, x: float) -> float:
        a, b = self.domain
        if x < a or x > b:
            return math.inf
        return self.core.eval(x)

    __call__ = eval

    def vertices(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Breakpoints and values of the core clipped to the domain."""
        a, b = self.domain
        if a == b:
            return (a,), (self.core.eval(a),)
        xs = [a]
        for x in self.core.breakpoints:
            if a + MERGE_TOL < x < b - MERGE_TOL:
                xs.append(x)
        xs.append(b)
        return tuple(xs), tuple(self.core.eval(x) for x in xs)

    def to_json_dict(self) -> dict:
        out = self.core.to_json_dict()
        out["domain"] = list(self.domain)
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExtendedPL":
        core = PLFunction.from_json_dict(data)
        try:
            a, b = data["domain"]
        except (KeyError, ValueError, TypeError) as exc:
            raise ProblemError(f"malformed ExtendedPL data: {exc}") from exc
        return cls(core, (a, b))


# -- envelopes -------------------------------------------------------------


def _chain(points: list[tuple[float, float]], lower: bool) -> list[tuple[float, float]]:
    """Monotone chain over x-sorted points; lower=True builds the convex minorant."""
    sign = 1.0 if lower else -1.0
    hull: list[tuple[float, float]] = []
    for p in points:
        while len(hull) >= 2:
            ox, oy = hull[-2]
            ax, ay = hull[-1]
            cross = (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox)
            # drop the middle point on a right turn or (near) collinearity
            scale = max(1.0, abs(ax - ox), abs(ay - oy), abs(p[0] - ox), abs(p[1] - oy))
            if sign * cross <= MERGE_TOL * scale:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def envelope(f: PLFunction, a: float, b: float, kind: str) -> PLFunction:
    """Convex or concave envelope of f restricted to [a, b].

    The result interpolates f at a subset of {a, b} plus the breakpoints of f
    inside (a, b), and continues affinely outside [a, b] with its end slopes.
    """
    if kind not in ("convex", "concave"):
        raise ProblemError(f"unknown envelope kind: {kind!r}")
    if not a < b:
        raise EmptyIntervalError(f"empty interval [{a}, {b}]")
    pts = [(a, f.eval(a))]
    for x in f.breakpoints:
        if a + MERGE_TOL < x < b - MERGE_TOL:
            pts.append((x, f.eval(x)))
    pts.append((b, f.eval(b)))
    hull = _chain(pts, lower=(kind == "convex"))
    return PLFunction.from_points(hull)


# -- Legendre-Fenchel conjugation -----------------------------------------


def _require_nondecreasing(slopes: Sequence[float], what: str) -> None:
    for s0, s1 in zip(slopes, slopes[1:]):
        if s1 < s0 - MERGE_TOL:
            raise ConvexityError(f"conjugate requires a convex {what} (slopes decrease: {s0} -> {s1})")


def _dedup(seq: list[float]) -> tuple[list[float], list[int]]:
    """Collapse near-equal consecutive entries; also return kept indices."""
    kept_x, kept_i = [seq[0]], [0]
    for i, s in enumerate(seq[1:], start=1):
        if s - kept_x[-1] > MERGE_TOL:
            kept_x.append(s)
            kept_i.append(i)
    return kept_x, kept_i


def conjugate(f: PLFunction | ExtendedPL) -> ExtendedPL | PLFunction:
    """Legendre-Fenchel transform f*(y) = sup_x (x*y - f(x)).

    A convex PLFunction maps to an ExtendedPL finite on its slope range; a
    convex ExtendedPL maps back to a globally Lipschitz convex PLFunction.
    Breakpoints and slopes swap roles in both directions.
    """
    if isinstance(f, ExtendedPL):
        return _conjugate_extended(f)
    g = f.normalized()
    _require_nondecreasing(g.all_slopes, "function")
    xs, vals = g.breakpoints, g.values
    sigma = list(g.all_slopes)  # length k + 1 for k breakpoints
    # attaining abscissa for each slope: tail slopes at the outer breakpoints,
    # piece j at either of its endpoints
    attain = [xs[0]] + [xs[j] for j in range(len(xs))]
    kept_s, kept_i = _dedup(sigma)
    star_vals = tuple(attain[i] * kept_s[j] - g.eval(attain[i]) for j, i in enumerate(kept_i))
    lo, hi = sigma[0], sigma[-1]
    if len(kept_s) == 1:
        core = PLFunction((kept_s[0],), star_vals, 0.0, 0.0)
        return ExtendedPL(core, (lo, lo))
    core = PLFunction(tuple(kept_s), star_vals, attain[kept_i[0]], attain[kept_i[-1]])
    return ExtendedPL(core, (lo, hi))


def _conjugate_extended(f: ExtendedPL) -> PLFunction:
    ys, vals = f.vertices()
    if len(ys) == 1:
        # conjugate of a single point (y0, c): the affine map x -> x*y0 - c
        return PLFunction((0.0,), (-vals[0],), ys[0], ys[0])
    taus = [(vals[j + 1] - vals[j]) / (ys[j + 1] - ys[j]) for j in range(len(ys) - 1)]
    _require_nondecreasing(taus, "function")
    kept_t, kept_j = _dedup(taus)
    out_vals = tuple(ys[j] * kept_t[i] - vals[j] for i, j in enumerate(kept_j))
    return PLFunction(tuple(kept_t), out_vals, ys[0], ys[-1]).normalized()


# -- sampling --------------------------------------------------------------


def pl_approx(
    target: Callable[[float], float] | Sequence[tuple[float, float]],
    k: int,
    domain: tuple[float, float],
) -> PLFunction:
    """Interpolate target at k+1 uniform nodes on [a, b]; tails keep end slopes."""
    a, b = domain
    if not a < b:
        raise EmptyIntervalError(f"empty interval [{a}, {b}]")
    if k < 2:
        raise ProblemError(f"need at least 2 subintervals, got {k}")
    if not callable(target):
        target = PLFunction.from_points(target)
    xs = np.linspace(a, b, k + 1)
    ys = []
    for x in xs:
        y = float(target(float(x)))
        if not math.isfinite(y):
            raise ProblemError(f"non-finite sample value at x = {x}")
        ys.append(y)
    return PLFunction.from_points(zip(map(float, xs), ys)).normalized()


# -- comparisons -----------------------------------------------------------


def pl_equal(f: PLFunction, g: PLFunction, atol: float = 0.0) -> bool:
    """Structural equality after normalization."""
    fn, gn = f.normalized(), g.normalized()
    if len(fn.breakpoints) != len(gn.breakpoints):
        return False
    pairs = zip(
        fn.breakpoints + fn.values + (fn.left_slope, fn.right_slope),
        gn.breakpoints + gn.values + (gn.left_slope, gn.right_slope),
    )
    return all(abs(p - q) <= atol for p, q in pairs)


def sup_diff_on(f: PLFunction, g: PLFunction, lo: float, hi: float) -> float:
    """sup |f - g| over [lo, hi], exact for PL arguments."""
    if not lo <= hi:
        raise EmptyIntervalError(f"empty interval [{lo}, {hi}]")
    cands = {lo, hi}
    for h in (f, g):
        for x in h.breakpoints:
            if lo < x < hi:
                cands.add(x)
    return max(abs(f.eval(x) - g.eval(x)) for x in cands)
