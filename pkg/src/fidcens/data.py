"""Observations, datasets, and time grids for interval-censored event times.

An observation records that an event time T landed in the half-open interval
(lower, upper]. Four shapes arise: exact times (lower == upper), left-censored
times (lower == 0), right-censored times (upper == inf), and genuine intervals.
Datasets are immutable sequences of observations read from or written to a
two-column CSV with header ``l,r``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParseError

__all__ = [
    "Kind",
    "Observation",
    "Dataset",
    "TimeGrid",
    "make_observation",
    "parse_dataset",
    "serialize_dataset",
    "default_grid",
]


class Kind(str, Enum):
    """Censoring shape of a single observation."""

    EXACT = "exact"
    LEFT_CENSORED = "left_censored"
    RIGHT_CENSORED = "right_censored"
    INTERVAL = "interval"


@dataclass(frozen=True)
class Observation:
    """One event time known to lie in (lower, upper].

    Exact observations are stored with lower == upper and behave like the
    degenerate interval (t-, t] everywhere downstream.
    """

    lower: float
    upper: float
    kind: Kind

    @property
    def is_exact(self) -> bool:
        return self.kind is Kind.EXACT


def _classify(lower: float, upper: float) -> Kind:
    if lower == upper:
        return Kind.EXACT
    if math.isinf(upper):
        return Kind.RIGHT_CENSORED
    if lower == 0.0:
        return Kind.LEFT_CENSORED
    return Kind.INTERVAL


def make_observation(lower: float, upper: float) -> Observation:
    """Validate a pair of interval endpoints and classify it.

    Parameters
    ----------
    lower : float
        Finite, non-negative left endpoint (exclusive).
    upper : float
        Right endpoint (inclusive), at least ``lower``; ``inf`` marks
        right censoring.

    Raises
    ------
    ValueError
        On NaN, negative or non-finite ``lower``, or ``upper < lower``.
    """
    lower = float(lower)
    upper = float(upper)
    if math.isnan(lower) or math.isnan(upper):
        raise ValueError("NaN endpoint")
    if math.isinf(lower):
        raise ValueError("lower endpoint must be finite")
    if lower < 0.0:
        raise ValueError(f"negative lower endpoint {lower!r}")
    if upper < lower:
        raise ValueError(f"upper < lower ({upper!r} < {lower!r})")
    if lower == 0.0 and math.isinf(upper):
        warnings.warn(
            "observation (0, inf) carries no information and is ignored by "
            "the constraints",
            stacklevel=2,
        )
    return Observation(lower, upper, _classify(lower, upper))


class Dataset:
    """Immutable collection of observations with cached endpoint arrays."""

    __slots__ = ("observations", "lower", "upper", "exact_mask")

    def __init__(self, observations: Iterable[Observation]):
        obs = tuple(observations)
        if not obs:
            raise ValueError("dataset needs at least one observation")
        object.__setattr__(self, "observations", obs)
        object.__setattr__(
            self, "lower", np.array([o.lower for o in obs], dtype=np.float64)
        )
        object.__setattr__(
            self, "upper", np.array([o.upper for o in obs], dtype=np.float64)
        )
        object.__setattr__(
            self,
            "exact_mask",
            np.array([o.is_exact for o in obs], dtype=np.bool_),
        )

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Dataset is immutable")

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self) -> Iterator[Observation]:
        return iter(self.observations)

    def __getitem__(self, i: int) -> Observation:
        return self.observations[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.observations == other.observations

    def __repr__(self) -> str:
        return f"Dataset(n={len(self)})"

    @property
    def n(self) -> int:
        return len(self.observations)

    def max_finite_endpoint(self) -> float:
        """Largest finite endpoint across all observations, 0.0 if none."""
        finite = self.upper[np.isfinite(self.upper)]
        hi = float(finite.max()) if finite.size else 0.0
        return max(hi, float(self.lower.max()))


def _parse_value(text: str, what: str, row: int) -> float:
    stripped = text.strip()
    if stripped == "" or stripped in ("inf", "Inf"):
        return math.inf
    try:
        value = float(stripped)
    except ValueError:
        raise ParseError(f"unreadable {what} value {stripped!r}", row) from None
    if math.isnan(value):
        raise ParseError(f"NaN {what} value", row)
    return value


def parse_dataset(path: str | Path) -> Dataset:
    """Read a dataset from a two-column CSV file.

    The file must start with the header ``l,r``; lines whose first
    non-blank character is ``#`` are ignored, and an empty or ``inf``/``Inf``
    upper field means right censoring. Errors carry the 1-based data row.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [
        ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty input, expected header 'l,r'")
    header = [c.strip() for c in next(csv.reader([lines[0]]))]
    if header != ["l", "r"]:
        raise ParseError(f"expected header 'l,r', got {lines[0]!r}")
    observations = []
    for row, record in enumerate(csv.reader(lines[1:]), start=1):
        if len(record) != 2:
            raise ParseError(f"expected 2 fields, got {len(record)}", row)
        lo = _parse_value(record[0], "lower", row)
        hi = _parse_value(record[1], "upper", row)
        if math.isinf(lo):
            raise ParseError("lower endpoint must be finite", row)
        if lo < 0.0:
            raise ParseError(f"negative lower endpoint {lo!r}", row)
        if hi < lo:
            raise ParseError("upper < lower", row)
        observations.append(make_observation(lo, hi))
    if not observations:
        raise ParseError("no data rows")
    return Dataset(observations)


def _format_endpoint(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return repr(value)


def serialize_dataset(ds: Dataset, path: str | Path) -> None:
    """Write ``ds`` so that :func:`parse_dataset` reads it back unchanged."""
    out = ["l,r"]
    for o in ds:
        out.append(f"{_format_endpoint(o.lower)},{_format_endpoint(o.upper)}")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing, finite, non-negative evaluation times."""

    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("grid needs at least 2 points")
        if not np.all(np.isfinite(times)):
            raise ValueError("grid times must be finite")
        if times[0] < 0.0:
            raise ValueError("grid times must be non-negative")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("grid times must be strictly increasing")
        object.__setattr__(self, "times", times)

    @property
    def m(self) -> int:
        return int(self.times.size)

    def __len__(self) -> int:
        return self.m


def default_grid(ds: Dataset, m: int) -> TimeGrid:
    """Equally spaced grid of ``m`` points spanning [0, max finite endpoint]."""
    if m < 2:
        raise ValueError("grid needs at least 2 points")
    hi = ds.max_finite_endpoint()
    if hi <= 0.0:
        raise ValueError("dataset has no positive finite endpoint to span")
    return TimeGrid(np.linspace(0.0, hi, m))
