"""Solvers for 1D Hamilton-Jacobi equations with piecewise linear data."""

from .errors import (
    BoxTooSmallError,
    CollisionBudgetError,
    ConvexityError,
    EmptyIntervalError,
    NumericalError,
    ProblemError,
)
from .piecewise import (
    ExtendedPL,
    PLFunction,
    SlopeInterval,
    conjugate,
    envelope,
    pl_approx,
    pl_equal,
    sup_diff_on,
)
from .riemann import RiemannFan, entropy_ok, fan_eval, solve_fan
from .fronttrack import FrontTrace, front_track
from .minmax import (
    FiberBox,
    PassResult,
    default_box,
    fiber_values,
    hopf_conj,
    hopf_lax,
    minmax_exact,
    minmax_grid,
    minmax_step,
)
from .genfam import (
    FrontSegment,
    GenFamily,
    PhaseCurve,
    WaveFrontCurve,
    big_front,
    build_phase_curve,
    build_wavefront,
    front_corners,
    s_eval,
    section_check,
)
from .iterate import (
    ConvergenceRow,
    ConvergenceStudy,
    IterationTrace,
    ShockPath,
    ShockSample,
    ShockVerdict,
    Subdivision,
    contact_shock_check,
    convergence_study,
    extract_shocks,
    iterated_minmax,
)

__all__ = [
    "BoxTooSmallError",
    "CollisionBudgetError",
    "ConvexityError",
    "EmptyIntervalError",
    "NumericalError",
    "ProblemError",
    "ExtendedPL",
    "PLFunction",
    "SlopeInterval",
    "conjugate",
    "envelope",
    "pl_approx",
    "pl_equal",
    "sup_diff_on",
    "RiemannFan",
    "entropy_ok",
    "fan_eval",
    "solve_fan",
    "FrontTrace",
    "front_track",
    "FiberBox",
    "PassResult",
    "default_box",
    "fiber_values",
    "hopf_conj",
    "hopf_lax",
    "minmax_exact",
    "minmax_grid",
    "minmax_step",
    "FrontSegment",
    "GenFamily",
    "PhaseCurve",
    "WaveFrontCurve",
    "big_front",
    "build_phase_curve",
    "build_wavefront",
    "front_corners",
    "s_eval",
    "section_check",
    "ConvergenceRow",
    "ConvergenceStudy",
    "IterationTrace",
    "ShockPath",
    "ShockSample",
    "ShockVerdict",
    "Subdivision",
    "contact_shock_check",
    "convergence_study",
    "extract_shocks",
    "iterated_minmax",
]

__version__ = "0.1.0"
