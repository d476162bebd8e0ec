"""Command line front end: spec in, artifact files out.

Each subcommand reads a JSON problem spec, runs the corresponding
operation, and writes its artifacts into --out.  With --server the spec
is posted to a running service instead and the returned artifacts are
written locally; outputs are identical either way.  Exit codes: 0 on
success, 2 for spec problems, 3 for numerical failures.  Set
HJFRONT_MAX_WORKERS to cap thread fan-out of independent sample
evaluations (default 1).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import NumericalError, ProblemError
from .problem import MAX_WORKERS_ENV, SUBCOMMANDS, parse_spec, run

EMIT_GROUPS = {
    "profiles": ("profiles.csv",),
    "shocks": ("shocks.svg", "shocks.json"),
    "errors": ("errors.csv",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hjfront",
        description="Piecewise linear Hamilton-Jacobi solvers: front tracking, "
        "mountain-pass minmax, iterated minmax.",
        epilog=f"Environment: {MAX_WORKERS_ENV} caps thread fan-out (default 1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "solve": "track the solution, emit trace JSON, profile CSV/SVG, shock diagram SVG",
        "minmax": "sample the fiber mountain-pass values, emit (x, minmax, maxmin, saddle) CSV",
        "iterate": "compose one-step operators over the subdivision, emit profiles/shocks/errors",
        "wavefront": "build the multivalued front and phase curve, emit JSON and SVG",
        "riemann": "resolve the first kink of v into its fan, emit JSON",
        "conjugate": "convex conjugate of H, emit JSON and print its domain",
        "envelope": "convex/concave envelope of H across the first kink's jump, emit JSON",
        "compare": "tracked vs one-step vs n-step table with the convex-dual column",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--spec", required=True, help="path to the JSON problem spec")
        p.add_argument("--out", default=".", help="directory for artifact files")
        p.add_argument("--server", default=None, help="base URL of a running service")
        if name == "minmax":
            p.add_argument("--resolution", type=int, default=None, help="fiber grid points per axis")
            p.add_argument("--box-margin", type=float, default=None, help="fiber box margin")
            p.add_argument("--samples", type=int, default=None, help="number of x samples")
        if name == "iterate":
            p.add_argument("--steps", type=int, default=None, help="uniform subdivision count")
            p.add_argument("--engine", choices=("exact-riemann", "grid"), default=None)
            p.add_argument(
                "--emit",
                choices=tuple(EMIT_GROUPS),
                default=None,
                help="restrict artifacts to one group",
            )
        p.set_defaults(func=_run_command)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_run_serve)
    return parser


def _overrides(args: argparse.Namespace, raw: dict) -> dict:
    if getattr(args, "resolution", None) is not None:
        raw.setdefault("grid", {})["nx"] = args.resolution
        raw["grid"]["ny"] = args.resolution
    if getattr(args, "box_margin", None) is not None:
        raw.setdefault("grid", {})["margin"] = args.box_margin
    if getattr(args, "samples", None) is not None:
        raw.setdefault("grid", {})["samples"] = args.samples
    if getattr(args, "steps", None) is not None:
        raw["subdivision"] = args.steps
    if getattr(args, "engine", None) is not None:
        raw["engine"] = args.engine
    if getattr(args, "emit", None) is not None:
        raw["outputs"] = list(EMIT_GROUPS[args.emit])
    return raw


def _load_raw_spec(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"cannot read spec file: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"spec is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ProblemError("spec must be a JSON object")
    return raw


def _post_to_server(server: str, command: str, raw: dict) -> dict[str, str]:
    import httpx

    url = server.rstrip("/") + "/" + command
    try:
        resp = httpx.post(url, json=raw, timeout=600.0)
    except httpx.HTTPError as exc:
        raise NumericalError(f"service request failed: {exc}") from exc
    if resp.status_code == 422:
        detail = resp.json().get("detail", resp.text)
        raise ProblemError(f"service rejected spec: {detail}")
    if resp.status_code != 200:
        raise NumericalError(f"service error {resp.status_code}: {resp.text}")
    return resp.json()["artifacts"]


def _summarize(command: str, artifacts: dict[str, str]) -> None:
    if command == "conjugate":
        data = json.loads(artifacts["conjugate.json"])
        if "domain" in data:
            a, b = data["domain"]
            print(f"domain [{a:.6g}, {b:.6g}]")
        vals = data["values"]
        lo, hi = min(vals) + 0.0, max(vals) + 0.0
        print(f"values in [{lo:.6g}, {hi:.6g}]")
    if command == "compare":
        data = json.loads(artifacts["compare.json"])
        print(
            f"sup error: one step {data['one_step_sup_error']:.6g}, "
            f"{data['steps']} steps {data['n_step_sup_error']:.6g}"
        )


def _run_command(args: argparse.Namespace) -> int:
    raw = _overrides(args, _load_raw_spec(args.spec))
    if args.server:
        artifacts = _post_to_server(args.server, args.command, raw)
    else:
        spec = parse_spec(json.dumps(raw))
        artifacts = run(spec, args.command)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(artifacts):
        path = out_dir / name
        path.write_text(artifacts[name], encoding="utf-8")
        print(f"wrote {path}")
    _summarize(args.command, artifacts)
    return 0


def _run_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("hjfront.service:app", host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProblemError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
