"""HTTP front end: one POST endpoint per subcommand, artifacts as JSON.

Requests carry a problem spec in the body; responses return every artifact
the run produced, keyed by filename.  Validation failures surface as 422
(straight from the spec models), numerical failures as 400.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .errors import NumericalError, ProblemError
from .problem import SUBCOMMANDS, ProblemSpec, run

app = FastAPI(title="hjfront", version=__version__)


class RunResponse(BaseModel):
    subcommand: str
    artifacts: dict[str, str]


class InfoResponse(BaseModel):
    version: str
    subcommands: list[str]


@app.exception_handler(ProblemError)
async def _problem_error(request: Request, exc: ProblemError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.exception_handler(NumericalError)
async def _numerical_error(request: Request, exc: NumericalError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/info", response_model=InfoResponse)
def info() -> InfoResponse:
    return InfoResponse(version=__version__, subcommands=list(SUBCOMMANDS))


def _make_endpoint(name: str):
    def endpoint(spec: ProblemSpec) -> RunResponse:
        return RunResponse(subcommand=name, artifacts=run(spec, name))

    endpoint.__name__ = f"run_{name}"
    return endpoint


for _name in SUBCOMMANDS:
    app.post(f"/{_name}", response_model=RunResponse)(_make_endpoint(_name))
