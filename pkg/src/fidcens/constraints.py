"""Precedence order among observations and conditional bounds for the sampler.

Observation i precedes observation j when upper_i <= lower_j, meaning every
distribution function consistent with the data forces u_i < u_j. Exact
observations act as the degenerate interval (t-, t]: an exact time t precedes
anything starting at or after t and is preceded by anything ending at or
before t, except that two exact observations at the same t leave their u's
unordered (both live inside the same jump of F).

All comparisons run on integer endpoint keys of the form 4 * rank + flag,
where rank orders the distinct endpoint values and the flag encodes which
boundary comparisons count at ties:

    right key: flag 0 (regular), 2 (exact)
    left  key: flag 1 (exact),   3 (regular)

With these flags, ``right_key[j] <= left_key[i]`` reproduces the precedence
rule including every tie case and never relates an observation to itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import InfeasibleStateError

__all__ = ["PrecedenceIndex", "build_index", "conditional_bounds", "feasible"]

_RIGHT_REGULAR = 0
_LEFT_EXACT = 1
_RIGHT_EXACT = 2
_LEFT_REGULAR = 3


def _endpoint_keys(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    exact = ds.exact_mask
    uniq = np.unique(np.concatenate([ds.lower, ds.upper]))
    lrank = np.searchsorted(uniq, ds.lower).astype(np.int64)
    rrank = np.searchsorted(uniq, ds.upper).astype(np.int64)
    left = 4 * lrank + np.where(exact, _LEFT_EXACT, _LEFT_REGULAR)
    right = 4 * rrank + np.where(exact, _RIGHT_EXACT, _RIGHT_REGULAR)
    return left, right


@dataclass(frozen=True)
class PrecedenceIndex:
    """Sorted-endpoint view of a dataset for O(log n) precedence queries.

    ``order_by_right``/``order_by_left`` are the observation indices sorted by
    right/left key. ``pred_count[i]`` says how many entries at the front of the
    right-sorted order precede i; ``succ_start[i]`` is the first position in
    the left-sorted order whose observation succeeds i.
    """

    n: int
    left_keys: np.ndarray
    right_keys: np.ndarray
    order_by_right: np.ndarray
    order_by_left: np.ndarray
    pos_in_right: np.ndarray
    pos_in_left: np.ndarray
    pred_count: np.ndarray
    succ_start: np.ndarray

    def predecessors(self, i: int) -> np.ndarray:
        """Indices j with upper_j <= lower_i (forcing u_j < u_i)."""
        return np.sort(self.order_by_right[: self.pred_count[i]])

    def successors(self, i: int) -> np.ndarray:
        """Indices j with upper_i <= lower_j (forcing u_i < u_j)."""
        return np.sort(self.order_by_left[self.succ_start[i] :])


def build_index(ds: Dataset) -> PrecedenceIndex:
    """Sort endpoint keys once so bound queries avoid pairwise scans."""
    left, right = _endpoint_keys(ds)
    order_by_right = np.argsort(right, kind="stable")
    order_by_left = np.argsort(left, kind="stable")
    right_sorted = right[order_by_right]
    left_sorted = left[order_by_left]
    pos_in_right = np.empty_like(order_by_right)
    pos_in_right[order_by_right] = np.arange(ds.n)
    pos_in_left = np.empty_like(order_by_left)
    pos_in_left[order_by_left] = np.arange(ds.n)
    pred_count = np.searchsorted(right_sorted, left, side="right")
    succ_start = np.searchsorted(left_sorted, right, side="left")
    return PrecedenceIndex(
        n=ds.n,
        left_keys=left,
        right_keys=right,
        order_by_right=order_by_right,
        order_by_left=order_by_left,
        pos_in_right=pos_in_right,
        pos_in_left=pos_in_left,
        pred_count=pred_count,
        succ_start=succ_start,
    )


def conditional_bounds(
    i: int, u: np.ndarray, idx: PrecedenceIndex
) -> tuple[float, float]:
    """Open interval (a, b) that coordinate i must occupy given the others.

    a is the largest u over predecessors of i (0 when there are none) and b
    the smallest u over successors (1 when there are none).

    Raises
    ------
    InfeasibleStateError
        If a >= b, which a feasible state can never produce.
    """
    preds = idx.order_by_right[: idx.pred_count[i]]
    succs = idx.order_by_left[idx.succ_start[i] :]
    a = float(u[preds].max()) if preds.size else 0.0
    b = float(u[succs].min()) if succs.size else 1.0
    if a >= b:
        raise InfeasibleStateError(
            f"empty conditional interval for coordinate {i}: ({a}, {b})"
        )
    return a, b


def feasible(u: np.ndarray, ds: Dataset, idx: PrecedenceIndex | None = None) -> bool:
    """Check u_i < u_j for every precedence pair i -> j.

    Accepts a single vector of shape (n,) or a batch of shape (k, n); a batch
    is feasible only if every row is.
    """
    if idx is None:
        idx = build_index(ds)
    mat = np.atleast_2d(np.asarray(u, dtype=np.float64))
    if mat.shape[1] != idx.n:
        raise ValueError(f"expected {idx.n} coordinates, got {mat.shape[1]}")
    # Largest predecessor value per coordinate via running max in right-key
    # order; strictness of the precedence inequality makes ties infeasible.
    by_right = mat[:, idx.order_by_right]
    running = np.maximum.accumulate(by_right, axis=1)
    has_pred = idx.pred_count > 0
    if not np.any(has_pred):
        return True
    slot = np.clip(idx.pred_count - 1, 0, idx.n - 1)
    largest_pred = running[:, slot]
    ok = largest_pred[:, has_pred] < mat[:, has_pred]
    return bool(np.all(ok))
