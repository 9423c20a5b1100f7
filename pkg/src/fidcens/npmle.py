"""Nonparametric maximum likelihood for interval-censored data.

The estimator concentrates all mass on the maximal intersection
intervals of the observations and fits the masses by self-consistency
iteration. Between those intervals the CDF is identified; inside them it
is not, so evaluation offers a choice of convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .curves import StepFunction
from .data import Dataset
from .errors import NumericalError

__all__ = [
    "TurnbullIntervals",
    "NpmleFit",
    "turnbull_intervals",
    "containment_matrix",
    "fit_em",
    "evaluate",
]

_RULES = ("interpolation", "left", "right")


def _slots(ds: Dataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-observation (start, end) slots on the shared endpoint lattice.

    Slot 2k sits just below the k-th distinct endpoint and slot 2k + 1
    at it, so interval relations reduce to integer comparisons. An
    interval (l, r] starts one slot above l and ends at r; an exact
    observation occupies the single slot at its value.
    """
    values = np.unique(np.concatenate([ds.lower, ds.upper]))
    lrank = np.searchsorted(values, ds.lower).astype(np.int64)
    rrank = np.searchsorted(values, ds.upper).astype(np.int64)
    start = np.where(ds.exact_mask, 2 * lrank + 1, 2 * lrank + 2)
    end = 2 * rrank + 1
    return values, start, end


@dataclass(frozen=True)
class TurnbullIntervals:
    """Maximal intersection intervals, in increasing order.

    ``lower_closed`` marks single-point atoms (the only closed-start
    case). ``q`` may end with inf when the data include an observation
    with no finite upper endpoint.
    """

    p: np.ndarray
    q: np.ndarray
    lower_closed: np.ndarray
    start_slot: np.ndarray
    end_slot: np.ndarray

    @property
    def k(self) -> int:
        return self.p.size


def turnbull_intervals(ds: Dataset) -> TurnbullIntervals:
    """Find the maximal intersection intervals of the observations.

    Sorts start and end slots together (starts first at ties) and emits
    an interval whenever a start event is immediately followed by an end
    event. No observation endpoint falls strictly inside any emitted
    interval.
    """
    values, start, end = _slots(ds)
    s_uni = np.unique(start)
    e_uni = np.unique(end)
    slot = np.concatenate([s_uni, e_uni])
    flag = np.concatenate([np.zeros(s_uni.size, np.int64), np.ones(e_uni.size, np.int64)])
    order = np.lexsort((flag, slot))
    slot, flag = slot[order], flag[order]

    emit = (flag[:-1] == 0) & (flag[1:] == 1)
    s_slots = slot[:-1][emit]
    e_slots = slot[1:][emit]

    odd = s_slots % 2 == 1
    p_idx = np.where(odd, s_slots // 2, s_slots // 2 - 1)
    return TurnbullIntervals(
        p=values[p_idx],
        q=values[e_slots // 2],
        lower_closed=odd,
        start_slot=s_slots,
        end_slot=e_slots,
    )


def containment_matrix(ds: Dataset, intervals: TurnbullIntervals) -> np.ndarray:
    """contains[i, j] = 1.0 when maximal interval j lies inside observation i."""
    _, start, end = _slots(ds)
    inside = (intervals.start_slot[None, :] >= start[:, None]) & (
        intervals.end_slot[None, :] <= end[:, None]
    )
    return inside.astype(np.float64)


@dataclass(frozen=True)
class NpmleFit:
    """Fitted masses on the maximal intersection intervals."""

    intervals: TurnbullIntervals
    masses: np.ndarray
    loglik: float
    n_iter: int
    converged: bool

    def cdf(self) -> StepFunction:
        """Step CDF placing each interval's mass at its upper endpoint."""
        return StepFunction(self.intervals.q, np.cumsum(self.masses))


def _containment_ranges(ds: Dataset, intervals: TurnbullIntervals):
    """First and last contained interval index per observation.

    Start and end slots of the maximal intersection intervals are both
    strictly increasing, so the contained set is a contiguous index run.
    """
    _, start, end = _slots(ds)
    first = np.searchsorted(intervals.start_slot, start, side="left").astype(np.int64)
    last = (np.searchsorted(intervals.end_slot, end, side="right") - 1).astype(np.int64)
    if np.any(first > last):
        raise NumericalError("an observation contains no maximal intersection interval")
    return first, last


def fit_em(ds: Dataset, tol: float = 1e-9, max_iter: int = 100_000) -> NpmleFit:
    """Self-consistency (EM) fit of the interval masses.

    Stops when the max-norm change of the mass vector drops below
    ``tol``. Hitting ``max_iter`` returns the last iterate with
    ``converged=False`` rather than raising; a decrease of the
    log-likelihood, which the iteration cannot legitimately produce,
    raises NumericalError.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    intervals = turnbull_intervals(ds)
    first, last = _containment_ranges(ds, intervals)
    ranges, counts = np.unique(np.stack([first, last], axis=1), axis=0, return_counts=True)
    masses, n_iter, status = _kernels.em_masses(
        np.ascontiguousarray(ranges[:, 0]),
        np.ascontiguousarray(ranges[:, 1]),
        counts.astype(np.float64),
        intervals.k,
        float(tol),
        int(max_iter),
    )
    if status == 2:
        raise NumericalError("self-consistency iteration decreased the log-likelihood")
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    loglik = float(np.log(cum[last + 1] - cum[first]).sum())
    return NpmleFit(
        intervals=intervals,
        masses=masses,
        loglik=loglik,
        n_iter=int(n_iter),
        converged=status == 0,
    )


def evaluate(fit: NpmleFit, t, rule: str = "interpolation"):
    """CDF of the fit at times ``t`` under the given within-interval rule.

    Outside the maximal intersection intervals the value is determined
    by the masses alone. Strictly inside an interval, "left" commits the
    mass at the lower end, "right" at the upper end, and "interpolation"
    spreads it linearly (an interval with infinite upper end contributes
    nothing until crossed).
    """
    if rule not in _RULES:
        raise ValueError(f"rule must be one of {_RULES}")
    tb = fit.intervals
    cumz = np.concatenate([[0.0], np.cumsum(fit.masses)])
    tt = np.asarray(t, dtype=np.float64)
    scalar = tt.ndim == 0
    tt = np.atleast_1d(tt)

    out = np.ones(tt.shape, dtype=np.float64)
    j = np.searchsorted(tb.q, tt, side="left")
    active = j < tb.k
    ja, ta = j[active], tt[active]

    hit = ta == tb.q[ja]
    before = ~hit & (ta <= tb.p[ja])
    inside = ~(hit | before)

    res = np.empty(ja.size, dtype=np.float64)
    res[hit] = cumz[ja[hit] + 1]
    res[before] = cumz[ja[before]]
    if rule == "left":
        res[inside] = cumz[ja[inside] + 1]
    elif rule == "right":
        res[inside] = cumz[ja[inside]]
    else:
        ji = ja[inside]
        frac = (ta[inside] - tb.p[ji]) / (tb.q[ji] - tb.p[ji])
        res[inside] = cumz[ji] + fit.masses[ji] * frac

    out[active] = res
    return float(out[0]) if scalar else out
