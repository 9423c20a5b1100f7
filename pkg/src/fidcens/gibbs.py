"""Gibbs sampler over the constrained uniform vector.

The target law is uniform on the set of u in (0,1)^n satisfying u_i < u_j
for every precedence pair i -> j. Coordinates are swept in index order; each
is redrawn uniformly on the open interval its neighbors leave it, which is
exactly its full conditional. Every post-burn-in sweep contributes one
sample, regridded onto the evaluation grid and smoothed through the tube.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .constraints import PrecedenceIndex, build_index, conditional_bounds, feasible
from .curves import FiducialSample, _GridEvaluator
from .data import Dataset, TimeGrid
from .errors import InfeasibleStateError
from .interp import draw_endpoints, solve_qp

__all__ = ["GibbsConfig", "initialize", "sweep", "run"]


@dataclass(frozen=True)
class GibbsConfig:
    """Chain length, burn-in, and seed for one sampler run."""

    n_mcmc: int = 1000
    n_burn: int = 100
    seed: int | np.random.SeedSequence | None = None

    def __post_init__(self):
        if self.n_mcmc < 1:
            raise ValueError("n_mcmc must be positive")
        if self.n_burn < 0:
            raise ValueError("n_burn must be non-negative")


def _midpoint_order(ds: Dataset) -> np.ndarray:
    """Observation indices sorted by interval midpoint.

    Right-censored rows use lower + t_max/2 as a surrogate midpoint and sort
    after everything tied with them; remaining ties keep input order.
    """
    t_max = ds.max_finite_endpoint()
    censored = np.isinf(ds.upper)
    mid = np.where(censored, ds.lower + 0.5 * t_max, 0.5 * (ds.lower + ds.upper))
    return np.lexsort((censored.astype(np.int8), mid))


def initialize(ds: Dataset, rng: np.random.Generator) -> np.ndarray:
    """Feasible starting vector: iid uniforms ranked like the midpoints."""
    order = _midpoint_order(ds)
    u = np.empty(ds.n, dtype=np.float64)
    u[order] = np.sort(rng.random(ds.n))
    return u


def sweep(
    u: np.ndarray, idx: PrecedenceIndex, rng: np.random.Generator
) -> np.ndarray:
    """One in-place coordinate sweep in index order. Returns u."""
    for i in range(idx.n):
        a, b = conditional_bounds(i, u, idx)
        u[i] = a + (b - a) * rng.random()
    return u


def run(ds: Dataset, grid: TimeGrid, cfg: GibbsConfig) -> list[FiducialSample]:
    """Draw cfg.n_mcmc fiducial samples with curves evaluated on the grid.

    Deterministic for a fixed seed: the sweep uniforms for the whole chain
    are drawn first (row per sweep, coordinate order within rows), then the
    anchor Betas per kept sample, so a pure-Python replay of
    initialize/sweep with the same generator reproduces the states exactly.
    """
    idx = build_index(ds)
    rng = np.random.default_rng(cfg.seed)
    u = initialize(ds, rng)
    total = cfg.n_burn + cfg.n_mcmc
    uniforms = rng.random((total, ds.n))
    states = np.empty((cfg.n_mcmc, ds.n), dtype=np.float64)
    status = _kernels.gibbs_sweeps(
        u,
        idx.order_by_right,
        idx.order_by_left,
        idx.pos_in_right,
        idx.pos_in_left,
        idx.pred_count,
        idx.succ_start,
        uniforms,
        cfg.n_burn,
        states,
    )
    if status != 0:
        raise InfeasibleStateError("sampler hit an empty conditional interval")
    if not feasible(states, ds, idx):
        raise InfeasibleStateError("sampler produced an infeasible state")

    ev = _GridEvaluator(ds, grid)
    lower_mat = ev.lower_curves(states)
    upper_mat = ev.upper_curves(states)
    samples = []
    for s in range(cfg.n_mcmc):
        problem = draw_endpoints(lower_mat[s], upper_mat[s], rng)
        smooth = solve_qp(problem)
        samples.append(
            FiducialSample(
                u=states[s],
                lower_on_grid=lower_mat[s],
                upper_on_grid=upper_mat[s],
                interp_on_grid=smooth,
            )
        )
    return samples
