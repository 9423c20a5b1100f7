"""Least-squares smooth curve through the tube between the bound curves.

Each sampler draw yields a tube [lower, upper] on the grid. The interpolated
curve minimizes the sum of squared successive differences between two anchor
values placed just outside the grid, subject to staying inside the tube. The
anchors are Beta(1/2, 1/2) draws scaled to (0, upper[0]) and (lower[-1], 1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, NumericalError

__all__ = ["QpProblem", "draw_endpoints", "solve_qp", "kkt_residual"]

KKT_TOL = 1e-8
FALLBACK_MAX_ITER = 10_000


@dataclass(frozen=True)
class QpProblem:
    """Tube bounds on the grid plus fixed anchor values outside it."""

    lower: np.ndarray
    upper: np.ndarray
    left: float
    right: float

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ValueError("bounds must be matching 1-d arrays")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        if not (np.isfinite(self.left) and np.isfinite(self.right)):
            raise ValueError("anchors must be finite")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def m(self) -> int:
        return int(self.lower.size)


def draw_endpoints(
    lower_on_grid: np.ndarray,
    upper_on_grid: np.ndarray,
    rng: np.random.Generator,
    max_tries: int = 1000,
) -> QpProblem:
    """Draw the two anchor values for one sample's tube.

    The left anchor is Beta(1/2,1/2) scaled to (0, upper[0]); the right one
    Beta(1/2,1/2) scaled to (lower[-1], 1). When the tube is wide at both
    ends the independent draws can invert (left > right), which would force
    a decreasing curve; the pair is then redrawn jointly so the curve stays
    a distribution function. A zero-width range pins the anchor and warns.
    """
    top = float(upper_on_grid[0])
    bottom = float(lower_on_grid[-1])
    pin_left = top <= 0.0
    pin_right = bottom >= 1.0
    if pin_left:
        warnings.warn("left anchor range is empty, pinning anchor at 0")
    if pin_right:
        warnings.warn("right anchor range is empty, pinning anchor at 1")
    left = 0.0
    right = 1.0
    for _ in range(max_tries):
        if not pin_left:
            left = top * float(rng.beta(0.5, 0.5))
        if not pin_right:
            right = bottom + (1.0 - bottom) * float(rng.beta(0.5, 0.5))
        if left <= right:
            return QpProblem(lower_on_grid, upper_on_grid, left, right)
    # unreachable in practice; the overlap (bottom, top) is never empty here
    warnings.warn("anchor redraw cap hit, pinning both anchors")
    mid = 0.5 * (bottom + top)
    return QpProblem(lower_on_grid, upper_on_grid, mid, mid)


def kkt_residual(problem: QpProblem, x: np.ndarray) -> float:
    """Max-norm optimality violation of x for the tube problem."""
    x = np.asarray(x, dtype=np.float64)
    prev = np.concatenate([[problem.left], x[:-1]])
    nxt = np.concatenate([x[1:], [problem.right]])
    g = 2.0 * (2.0 * x - prev - nxt)
    at_lower = x <= problem.lower + 1e-14
    at_upper = x >= problem.upper - 1e-14
    res = np.abs(g)
    res[at_lower] = np.maximum(0.0, -g[at_lower])
    res[at_upper] = np.maximum(0.0, g[at_upper])
    both = at_lower & at_upper
    res[both] = 0.0
    violation = np.maximum(problem.lower - x, x - problem.upper).max()
    return float(max(res.max(), violation))


def solve_qp(problem: QpProblem) -> np.ndarray:
    """Solve the tube problem to a KKT residual below 1e-8.

    Uses the active-set iteration; if that stalls, falls back to projected
    gradient with a 10^4 iteration cap and raises ConvergenceError beyond it.
    With non-decreasing bounds and left <= right the solution is
    non-decreasing; rounding-level wiggles are flattened, anything larger
    raises.
    """
    x, status = _kernels.solve_chain_qp(
        problem.lower, problem.upper, problem.left, problem.right, 50 * problem.m + 200
    )
    if status != 0 or kkt_residual(problem, x) > KKT_TOL:
        x, _, status = _kernels.project_gradient_chain_qp(
            problem.lower,
            problem.upper,
            problem.left,
            problem.right,
            x,
            KKT_TOL,
            FALLBACK_MAX_ITER,
        )
        if status != 0:
            raise ConvergenceError(
                f"tube solver exceeded {FALLBACK_MAX_ITER} fallback iterations"
            )
    monotone_tube = bool(
        np.all(np.diff(problem.lower) >= 0.0) and np.all(np.diff(problem.upper) >= 0.0)
    )
    if monotone_tube and problem.left <= problem.right:
        drop = float(np.diff(x).min()) if problem.m > 1 else 0.0
        if drop < -1e-9:
            raise NumericalError(f"non-monotone tube solution (drop {drop})")
        x = np.maximum.accumulate(x)
    return x
