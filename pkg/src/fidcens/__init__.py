"""Nonparametric fiducial inference for interval-censored survival data."""

__version__ = "0.1.0"

from .constraints import PrecedenceIndex, build_index, conditional_bounds, feasible
from .curves import FiducialSample, StepFunction, lower_bound, regrid, upper_bound
from .data import (
    Dataset,
    Kind,
    Observation,
    TimeGrid,
    default_grid,
    make_observation,
    parse_dataset,
    serialize_dataset,
)
from .errors import ConvergenceError, InfeasibleStateError, NumericalError, ParseError
from .gibbs import GibbsConfig, initialize, run, sweep
from .inference import (
    CurveEstimate,
    conservative_ci,
    interpolation_ci,
    log_plausibility,
    order_statistic_quantile,
    plausibility,
)
from .npmle import NpmleFit, TurnbullIntervals, evaluate, fit_em, turnbull_intervals
from .simulate import (
    ExperimentResult,
    Scenario,
    gamma_median,
    generate,
    get_scenario,
    run_experiment,
    scenario_grid,
)

__all__ = [
    "__version__",
    "ConvergenceError",
    "CurveEstimate",
    "Dataset",
    "ExperimentResult",
    "FiducialSample",
    "GibbsConfig",
    "InfeasibleStateError",
    "Kind",
    "NpmleFit",
    "NumericalError",
    "Observation",
    "ParseError",
    "PrecedenceIndex",
    "Scenario",
    "StepFunction",
    "TimeGrid",
    "TurnbullIntervals",
    "build_index",
    "conditional_bounds",
    "conservative_ci",
    "default_grid",
    "feasible",
    "evaluate",
    "fit_em",
    "gamma_median",
    "generate",
    "get_scenario",
    "initialize",
    "interpolation_ci",
    "log_plausibility",
    "lower_bound",
    "make_observation",
    "order_statistic_quantile",
    "parse_dataset",
    "plausibility",
    "regrid",
    "run",
    "run_experiment",
    "scenario_grid",
    "serialize_dataset",
    "sweep",
    "turnbull_intervals",
    "upper_bound",
]
