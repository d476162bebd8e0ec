"""Problem specs (JSON), validation, and the artifact runner.

A spec names the two piecewise linear ingredients (directly, or as
polynomial coefficients to approximate), the horizon, the time
subdivision, and fiber-grid parameters.  `run` turns a validated spec
plus a subcommand name into a dict of artifact files; the CLI and the
HTTP service both call it, so their outputs are identical.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import emit
from .errors import ProblemError
from .fronttrack import front_track
from .genfam import build_phase_curve, build_wavefront, section_check
from .iterate import Subdivision, convergence_study, extract_shocks, iterated_minmax
from .minmax import hopf_conj, hopf_lax, minmax_exact, minmax_grid
from .piecewise import ExtendedPL, PLFunction, conjugate, envelope, pl_approx
from .riemann import solve_fan

MAX_WORKERS_ENV = "HJFRONT_MAX_WORKERS"

SUBCOMMANDS = (
    "solve",
    "minmax",
    "iterate",
    "wavefront",
    "riemann",
    "conjugate",
    "envelope",
    "compare",
)


class PLData(BaseModel):
    model_config = ConfigDict(extra="forbid")

    breakpoints: list[float]
    values: list[float]
    tails: tuple[float, float]

    def build(self) -> PLFunction:
        return PLFunction(tuple(self.breakpoints), tuple(self.values), *self.tails)


class PolyData(BaseModel):
    """Polynomial in ascending coefficient order, sampled to a PL function."""

    model_config = ConfigDict(extra="forbid")

    coefficients: list[float]
    pl_resolution: int = Field(default=200, ge=2)
    window: tuple[float, float] = (-2.0, 2.0)

    @model_validator(mode="after")
    def _window_ordered(self):
        if not self.window[0] < self.window[1]:
            raise ValueError("window endpoints must increase")
        if not self.coefficients:
            raise ValueError("coefficients must be nonempty")
        return self

    def build(self) -> PLFunction:
        coeffs = list(self.coefficients)

        def f(x: float) -> float:
            return float(np.polynomial.polynomial.polyval(x, coeffs))

        return pl_approx(f, self.pl_resolution, self.window)


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nx: int = Field(default=512, ge=8)
    ny: int = Field(default=512, ge=8)
    margin: float = Field(default=1.0, gt=0.0)
    samples: int = Field(default=33, ge=2)


class ProblemSpec(BaseModel):
    v: PLData | PolyData
    hamiltonian: PLData | PolyData = Field(alias="H")
    T: float = Field(default=1.0, gt=0.0)
    domain: tuple[float, float] | None = None
    subdivision: int | list[float] = 8
    grid: GridSpec = GridSpec()
    engine: str = "exact-riemann"
    outputs: list[str] | None = None

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="after")
    def _check(self):
        if self.domain is not None and not self.domain[0] < self.domain[1]:
            raise ValueError("domain endpoints must increase")
        if isinstance(self.subdivision, int):
            if self.subdivision < 1:
                raise ValueError("subdivision count must be positive")
        else:
            if not self.subdivision:
                raise ValueError("subdivision times must be nonempty")
        if self.engine not in ("exact-riemann", "grid"):
            raise ValueError("engine must be exact-riemann or grid")
        return self

    def build_v(self) -> PLFunction:
        return self.v.build()

    def build_H(self) -> PLFunction:
        return self.hamiltonian.build()

    def build_subdivision(self) -> Subdivision:
        if isinstance(self.subdivision, int):
            return Subdivision.uniform(self.T, self.subdivision)
        times = [float(t) for t in self.subdivision]
        if times[0] != 0.0:
            times = [0.0] + times
        if abs(times[-1] - self.T) > 1e-12:
            times = times + [self.T]
        return Subdivision(tuple(times))

    def window(self, v: PLFunction, H: PLFunction) -> tuple[float, float]:
        if self.domain is not None:
            return self.domain
        reach = self.T * H.lipschitz + 1.0
        return (min(v.breakpoints) - reach, max(v.breakpoints) + reach)


def parse_spec(text: str) -> ProblemSpec:
    """Validate JSON spec text; errors name the offending field."""
    try:
        return ProblemSpec.model_validate_json(text)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err["loc"]) or "spec"
            lines.append(f"{loc}: {err['msg']}")
        raise ProblemError("invalid spec: " + "; ".join(lines)) from exc


def _max_workers() -> int:
    raw = os.environ.get(MAX_WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _minmax_rows(spec: ProblemSpec, v: PLFunction, H: PLFunction) -> list[tuple]:
    lo, hi = spec.window(v, H)
    t = spec.T
    xs = [lo + (hi - lo) * i / (spec.grid.samples - 1) for i in range(spec.grid.samples)]

    def one(x: float) -> tuple:
        r = minmax_grid(v, H, t, x, nx=spec.grid.nx, ny=spec.grid.ny, margin=spec.grid.margin)
        return (x, r.minmax_value, r.maxmin_value, minmax_exact(v, H, t, x))

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, xs))
    return [one(x) for x in xs]


def _first_kink(v: PLFunction) -> tuple[float, float, float]:
    ks = v.kinks()
    if not ks:
        raise ProblemError("the initial function has no kink to resolve")
    return ks[0]


def run(spec: ProblemSpec, subcommand: str) -> dict[str, str]:
    """Artifacts for one subcommand, as {filename: text content}."""
    if subcommand not in SUBCOMMANDS:
        raise ProblemError(f"unknown subcommand: {subcommand}")
    v = spec.build_v()
    H = spec.build_H()
    lo, hi = spec.window(v, H)
    out: dict[str, str] = {}

    if subcommand == "solve":
        trace = front_track(v, H, spec.T)
        u = trace.profile(spec.T)
        out["solution.json"] = emit.dumps_json(emit.trace_json_dict(trace))
        out["profile.csv"] = emit.profile_csv([("u", u)], lo, hi)
        out["shocks.svg"] = emit.shock_diagram_svg(trace)
        out["profile.svg"] = emit.profiles_svg([("initial", v), ("final", u)], lo, hi)

    elif subcommand == "minmax":
        rows = _minmax_rows(spec, v, H)
        out["minmax.csv"] = emit.csv_table(["x", "minmax", "maxmin", "saddle"], rows)
        out["minmax.json"] = emit.dumps_json(
            {
                "t": spec.T,
                "rows": [
                    {"x": x, "minmax": mm, "maxmin": Mm, "saddle": ex}
                    for x, mm, Mm, ex in rows
                ],
            }
        )

    elif subcommand == "iterate":
        z = spec.build_subdivision()
        trace = iterated_minmax(v, H, z, engine=spec.engine)
        reference = front_track(v, H, z.horizon)
        paths = extract_shocks(trace, H)
        named = [(f"step_{i}", p) for i, p in enumerate(trace.profiles)]
        out["profiles.csv"] = emit.profile_csv(named, lo, hi)
        study = convergence_study(v, H, z.horizon, _step_counts(z), engine=spec.engine)
        out["errors.csv"] = emit.csv_table(
            ["steps", "mesh", "sup_error", "bound"],
            [(r.n, r.mesh, r.sup_error, r.bound) for r in study.rows],
        )
        out["shocks.svg"] = emit.overlay_shock_svg(reference, paths, z.horizon)
        out["shocks.json"] = emit.dumps_json(
            {
                "engine": spec.engine,
                "times": list(z.times),
                "paths": [
                    [
                        {
                            "t": q.t,
                            "x": q.x,
                            "left_slope": q.left_slope,
                            "right_slope": q.right_slope,
                        }
                        for q in p.points
                    ]
                    for p in paths
                ],
            }
        )

    elif subcommand == "wavefront":
        front = build_wavefront(v, H, spec.T)
        ok = section_check(front, front_track(v, H, spec.T).profile(spec.T))
        out["front.json"] = emit.dumps_json(
            {"section_of_viscosity": ok, **front.to_json_dict()}
        )
        out["front.svg"] = emit.wavefront_svg(front)
        curve = build_phase_curve(v, H, spec.T)
        out["phase.json"] = emit.dumps_json(curve.to_json_dict())

    elif subcommand == "riemann":
        xbar, pl_, pr = _first_kink(v)
        fan = solve_fan(pl_, pr, H, apex=(0.0, xbar))
        out["fan.json"] = emit.dumps_json(emit.pl_to_json_dict(v) | {"fan": fan.to_json_dict()})

    elif subcommand == "conjugate":
        star = conjugate(H)
        out["conjugate.json"] = emit.dumps_json(emit.pl_to_json_dict(star))

    elif subcommand == "envelope":
        xbar, pl_, pr = _first_kink(v)
        a, b = min(pl_, pr), max(pl_, pr)
        kind = "concave" if pl_ > pr else "convex"
        env = envelope(H, a, b, kind)
        out["envelope.json"] = emit.dumps_json(
            {
                "jump": [pl_, pr],
                "kind": kind,
                "hamiltonian": emit.pl_to_json_dict(H),
                "envelope": emit.pl_to_json_dict(env),
            }
        )

    elif subcommand == "compare":
        trace = front_track(v, H, spec.T)
        u_ref = trace.profile(spec.T)
        one = iterated_minmax(v, H, Subdivision.uniform(spec.T, 1), engine=spec.engine)
        z = spec.build_subdivision()
        many = iterated_minmax(v, H, z, engine=spec.engine)
        xs = sorted(
            {lo + (hi - lo) * i / 128 for i in range(129)}
            | {b for b in u_ref.breakpoints if lo <= b <= hi}
        )
        rows = []
        for x in xs:
            r1 = one.profiles[-1].eval(x)
            rn = many.profiles[-1].eval(x)
            ref = u_ref.eval(x)
            j = _dual_value(v, H, spec.T, x)
            rows.append((x, ref, r1, rn, j, abs(r1 - ref), abs(rn - ref)))
        out["compare.csv"] = emit.csv_table(
            ["x", "tracked", "one_step", "n_step", "convex_dual", "one_step_err", "n_step_err"],
            rows,
        )
        sup1 = max(r[5] for r in rows)
        supn = max(r[6] for r in rows)
        out["compare.json"] = emit.dumps_json(
            {
                "steps": len(z.times) - 1,
                "one_step_sup_error": sup1,
                "n_step_sup_error": supn,
                "min_gap_one_step_vs_dual": min(r[4] - r[2] for r in rows),
            }
        )

    if spec.outputs:
        missing = [name for name in spec.outputs if name not in out]
        if missing:
            raise ProblemError(f"unknown outputs for {subcommand}: {', '.join(missing)}")
        out = {name: out[name] for name in spec.outputs}
    return out


def _step_counts(z: Subdivision) -> list[int]:
    n = len(z.times) - 1
    counts = sorted({1, max(1, n // 2), n})
    return counts


def _dual_value(v: PLFunction, H: PLFunction, t: float, x: float) -> float:
    """Convex-dual comparison value: exact where one ingredient is convex."""
    sl = v.all_slopes
    if all(a <= b + 1e-12 for a, b in zip(sl, sl[1:])):
        return hopf_conj(v, H, t, x)
    hs = H.all_slopes
    if all(a <= b + 1e-12 for a, b in zip(hs, hs[1:])):
        return hopf_lax(v, H, t, x)
    return math.nan
