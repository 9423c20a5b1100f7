"""Point estimates, confidence bands, and the plausibility functional."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import FiducialSample, StepFunction
from .data import Dataset, TimeGrid

__all__ = [
    "CurveEstimate",
    "order_statistic_quantile",
    "conservative_ci",
    "interpolation_ci",
    "plausibility",
    "log_plausibility",
]


def order_statistic_quantile(values: np.ndarray, q: float) -> float:
    """The ceil(q*N)-th order statistic (left-continuous inverse CDF)."""
    if not 0.0 < q < 1.0:
        raise ValueError("quantile level must be in (0, 1)")
    v = np.sort(np.asarray(values, dtype=np.float64))
    k = min(max(math.ceil(q * v.size), 1), v.size)
    return float(v[k - 1])


def _column_order_stat(mat: np.ndarray, q: float) -> np.ndarray:
    k = min(max(math.ceil(q * mat.shape[0]), 1), mat.shape[0])
    return np.sort(mat, axis=0)[k - 1]


@dataclass(frozen=True)
class CurveEstimate:
    """Pointwise estimate and confidence band on a time grid."""

    grid: TimeGrid
    point: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    alpha: float
    method: str

    def __post_init__(self):
        m = self.grid.m
        for name in ("point", "ci_lower", "ci_upper"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (m,):
                raise ValueError(f"{name} must have shape ({m},)")
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ValueError(f"{name} must stay in [0, 1]")
            if np.any(np.diff(arr) < 0.0):
                raise ValueError(f"{name} must be non-decreasing")
            object.__setattr__(self, name, arr)
        if np.any(self.ci_lower > self.point) or np.any(self.point > self.ci_upper):
            raise ValueError("point estimate must lie inside the band")


def _stack(samples: list[FiducialSample], field: str) -> np.ndarray:
    if len(samples) < 2:
        raise ValueError("need at least 2 samples")
    return np.stack([getattr(s, field) for s in samples])


def interpolation_ci(
    samples: list[FiducialSample], grid: TimeGrid, alpha: float = 0.05
) -> CurveEstimate:
    """Pointwise band from quantiles of the smoothed curves.

    The point estimate is the pointwise median of the smoothed curves; the
    band takes the alpha/2 and 1 - alpha/2 quantiles of the same curves,
    using the order-statistic convention throughout.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    smooth = _stack(samples, "interp_on_grid")
    return CurveEstimate(
        grid=grid,
        point=_column_order_stat(smooth, 0.5),
        ci_lower=_column_order_stat(smooth, alpha / 2.0),
        ci_upper=_column_order_stat(smooth, 1.0 - alpha / 2.0),
        alpha=alpha,
        method="interpolation",
    )


def conservative_ci(
    samples: list[FiducialSample], grid: TimeGrid, alpha: float = 0.05
) -> CurveEstimate:
    """Pointwise band from the bound curves themselves.

    Lower limit: alpha/2 quantile of the lower bound curves. Upper limit:
    1 - alpha/2 quantile of the upper bound curves. Contains the
    interpolation band at the same level by construction.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    smooth = _stack(samples, "interp_on_grid")
    low = _stack(samples, "lower_on_grid")
    high = _stack(samples, "upper_on_grid")
    return CurveEstimate(
        grid=grid,
        point=_column_order_stat(smooth, 0.5),
        ci_lower=_column_order_stat(low, alpha / 2.0),
        ci_upper=_column_order_stat(high, 1.0 - alpha / 2.0),
        alpha=alpha,
        method="conservative",
    )


def log_plausibility(F: StepFunction, ds: Dataset) -> float:
    """Log of the product of interval masses F assigns to the observations.

    Exact observations contribute the jump of F at their time, the
    (t - eps, t] limit of the interval mass. Any zero factor gives -inf.
    """
    hi = np.atleast_1d(np.asarray(F(ds.upper), dtype=np.float64))
    lo = np.atleast_1d(np.asarray(F(ds.lower), dtype=np.float64))
    exact = ds.exact_mask
    if np.any(exact):
        lo[exact] = np.atleast_1d(F.left_limit(ds.lower[exact]))
    factors = hi - lo
    if np.any(factors <= 0.0):
        return -math.inf
    return float(np.log(factors).sum())


def plausibility(F: StepFunction, ds: Dataset) -> float:
    """Product of the observation interval masses under F, in [0, 1]."""
    lp = log_plausibility(F, ds)
    return math.exp(lp) if lp > -math.inf else 0.0
