"""Shared helpers: random PL instances and brute-force oracles."""
from __future__ import annotations

import numpy as np

from hjfront.piecewise import PLFunction


def random_pl(
    rng: np.random.Generator,
    n_kinks: int,
    slope_bound: float = 2.0,
    x_span: float = 2.0,
) -> PLFunction:
    """Random PL function with the given number of interior breakpoints."""
    n = max(1, n_kinks)
    xs = np.sort(rng.uniform(-x_span, x_span, size=n))
    # enforce separation so normalization keeps every kink
    xs += np.arange(n) * 1e-6
    slopes = rng.uniform(-slope_bound, slope_bound, size=n + 1)
    y0 = float(rng.uniform(-1.0, 1.0))
    ys = [y0]
    for i in range(n - 1):
        ys.append(ys[-1] + slopes[i + 1] * (xs[i + 1] - xs[i]))
    return PLFunction(
        tuple(map(float, xs)), tuple(map(float, ys)), float(slopes[0]), float(slopes[-1])
    ).normalized()


def random_convex_pl(
    rng: np.random.Generator,
    n_kinks: int,
    slope_bound: float = 2.0,
    x_span: float = 2.0,
) -> PLFunction:
    """Random convex PL function (sorted slopes)."""
    n = max(1, n_kinks)
    xs = np.sort(rng.uniform(-x_span, x_span, size=n)) + np.arange(n) * 1e-6
    slopes = np.sort(rng.uniform(-slope_bound, slope_bound, size=n + 1))
    # spread ties so each breakpoint is a genuine kink
    for i in range(1, n + 1):
        if slopes[i] - slopes[i - 1] < 1e-3:
            slopes[i] = slopes[i - 1] + 1e-3
    y0 = float(rng.uniform(-1.0, 1.0))
    ys = [y0]
    for i in range(n - 1):
        ys.append(ys[-1] + slopes[i + 1] * (xs[i + 1] - xs[i]))
    return PLFunction(
        tuple(map(float, xs)), tuple(map(float, ys)), float(slopes[0]), float(slopes[-1])
    ).normalized()


def brute_conjugate(f, y: float, lo: float, hi: float, n: int = 20001) -> float:
    """sup_x (x*y - f(x)) by dense search on [lo, hi]."""
    xs = np.linspace(lo, hi, n)
    vals = xs * y - f.eval_many(xs)
    return float(vals.max())


def brute_envelope_value(f, a: float, b: float, x: float, kind: str) -> float:
    """Envelope of f|[a, b] at x by brute force over vertex chords."""
    pts = [(a, f.eval(a))] + [
        (bp, f.eval(bp)) for bp in f.breakpoints if a < bp < b
    ] + [(b, f.eval(b))]
    best = None
    for i, (u, fu) in enumerate(pts):
        for w, fw in pts[i:]:
            if not u <= x <= w:
                continue
            val = fu if u == w else fu + (fw - fu) * (x - u) / (w - u)
            if best is None:
                best = val
            elif kind == "convex":
                best = min(best, val)
            else:
                best = max(best, val)
    return best
