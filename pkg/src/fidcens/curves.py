"""Fiducial bound curves and step-function utilities.

Given a constrained-uniform vector u, the data admit a tube of distribution
functions: every consistent F satisfies lower(t) <= F(t) <= upper(t) with

    lower(t) = max{u_i : upper_i <= t}   (0 when the set is empty)
    upper(t) = min{u_i : lower_i >  t}   (1 when the set is empty)

Both are non-decreasing right-continuous step functions; this module
evaluates them pointwise and regrids them onto a fixed time grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, TimeGrid

__all__ = [
    "StepFunction",
    "FiducialSample",
    "lower_bound",
    "upper_bound",
    "regrid",
]


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function, zero before the first knot.

    ``knots`` must increase strictly; ``values[k]`` is the function value on
    [knots[k], knots[k+1]). A final knot at ``inf`` is allowed and carries
    the terminal value.
    """

    knots: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if knots.ndim != 1 or values.shape != knots.shape or knots.size == 0:
            raise ValueError("knots and values must be matching 1-d arrays")
        if np.any(np.diff(knots) <= 0.0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.isnan(knots)) or np.any(np.isnan(values)):
            raise ValueError("NaN in step function")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)

    def __call__(self, t) -> np.ndarray | float:
        t_arr = np.asarray(t, dtype=np.float64)
        pos = np.searchsorted(self.knots, t_arr, side="right")
        padded = np.concatenate([[0.0], self.values])
        out = padded[pos]
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def left_limit(self, t) -> np.ndarray | float:
        """Value just before t, i.e. the limit from the left."""
        t_arr = np.asarray(t, dtype=np.float64)
        pos = np.searchsorted(self.knots, t_arr, side="left")
        padded = np.concatenate([[0.0], self.values])
        out = padded[pos]
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


@dataclass(frozen=True)
class FiducialSample:
    """One draw of the sampler with its curves evaluated on the grid."""

    u: np.ndarray
    lower_on_grid: np.ndarray
    upper_on_grid: np.ndarray
    interp_on_grid: np.ndarray


def lower_bound(u: np.ndarray, ds: Dataset, t: float) -> float:
    """Largest u over observations certainly concluded by time t."""
    mask = ds.upper <= t
    return float(u[mask].max()) if np.any(mask) else 0.0


def upper_bound(u: np.ndarray, ds: Dataset, t: float) -> float:
    """Smallest u over observations certainly not started by time t."""
    mask = ds.lower > t
    return float(u[mask].min()) if np.any(mask) else 1.0


class _GridEvaluator:
    """Sorted-endpoint tables mapping u vectors onto a grid in O(n log n)."""

    def __init__(self, ds: Dataset, grid: TimeGrid):
        self.n = ds.n
        self.order_by_upper = np.argsort(ds.upper, kind="stable")
        self.order_by_lower = np.argsort(ds.lower, kind="stable")
        upper_sorted = ds.upper[self.order_by_upper]
        lower_sorted = ds.lower[self.order_by_lower]
        # count of observations with upper <= t, per grid point
        self.n_concluded = np.searchsorted(upper_sorted, grid.times, side="right")
        # first position in lower-sorted order with lower > t, per grid point
        self.first_later = np.searchsorted(lower_sorted, grid.times, side="right")

    def lower_curves(self, u_mat: np.ndarray) -> np.ndarray:
        by_upper = u_mat[:, self.order_by_upper]
        running_max = np.maximum.accumulate(by_upper, axis=1)
        slot = np.clip(self.n_concluded - 1, 0, self.n - 1)
        vals = running_max[:, slot]
        return np.where(self.n_concluded > 0, vals, 0.0)

    def upper_curves(self, u_mat: np.ndarray) -> np.ndarray:
        by_lower = u_mat[:, self.order_by_lower]
        running_min = np.minimum.accumulate(by_lower[:, ::-1], axis=1)[:, ::-1]
        slot = np.clip(self.first_later, 0, self.n - 1)
        vals = running_min[:, slot]
        return np.where(self.first_later < self.n, vals, 1.0)


def regrid(
    u: np.ndarray, ds: Dataset, grid: TimeGrid
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the lower and upper bound curves of u at every grid time.

    Returns
    -------
    (lower_on_grid, upper_on_grid)
        Two arrays of shape (m,), non-decreasing, with lower <= upper.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (ds.n,):
        raise ValueError(f"expected u of shape ({ds.n},)")
    ev = _GridEvaluator(ds, grid)
    mat = u[None, :]
    return ev.lower_curves(mat)[0], ev.upper_curves(mat)[0]
