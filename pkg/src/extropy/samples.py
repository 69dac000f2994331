"""Sample containers, empirical distribution functions and the reverse
Kaplan-Meier estimator of the censoring survival curve."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidSampleError

__all__ = [
    "Sample",
    "SortedSample",
    "CensoredSample",
    "StepSurvival",
    "EmpiricalDistribution",
    "as_sample",
    "sort_sample",
    "km_censoring_survival",
    "left_limit",
    "empirical_cdf",
]


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _check_times(values: NDArray, what: str = "value") -> None:
    if values.ndim != 1:
        raise InvalidSampleError(f"expected a one-dimensional sample, got shape {values.shape}")
    if values.size == 0:
        raise InvalidSampleError("empty sample")
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise InvalidSampleError(f"{what} at position {i} is not finite: {values[i]!r}")
    bad = values <= 0
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise InvalidSampleError(f"{what} at position {i} is not strictly positive: {values[i]!r}")


@dataclass(frozen=True)
class Sample:
    """Complete positive lifetime data."""

    values: NDArray[np.float64]

    def __post_init__(self):
        try:
            values = np.asarray(self.values, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InvalidSampleError(f"sample is not numeric: {exc}") from None
        _check_times(values)
        object.__setattr__(self, "values", _frozen(values))

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class SortedSample:
    """Order statistics; ``ordered[i]`` is the (i+1)-th smallest value."""

    ordered: NDArray[np.float64]

    def __len__(self) -> int:
        return self.ordered.size

    @property
    def n(self) -> int:
        return self.ordered.size


def as_sample(data: Sample | ArrayLike) -> Sample:
    """Coerce array-like input to a validated :class:`Sample`."""
    if isinstance(data, Sample):
        return data
    if isinstance(data, SortedSample):
        return Sample(data.ordered)
    return Sample(data)


def sort_sample(s: Sample | ArrayLike) -> SortedSample:
    """Return the order statistics of ``s`` (stable under ties)."""
    s = as_sample(s)
    return SortedSample(_frozen(np.sort(s.values, kind="stable")))


@dataclass(frozen=True)
class CensoredSample:
    """Right-censored observations ``(time, status)``; status 1 is an event."""

    times: NDArray[np.float64]
    status: NDArray[np.int8]

    def __post_init__(self):
        try:
            times = np.asarray(self.times, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InvalidSampleError(f"times are not numeric: {exc}") from None
        _check_times(times, "time")
        raw = np.asarray(self.status)
        if raw.shape != times.shape:
            raise InvalidSampleError(
                f"times and status differ in length ({times.size} vs {raw.size})"
            )
        ok = np.isin(raw, (0, 1))
        if not ok.all():
            i = int(np.flatnonzero(~ok)[0])
            raise InvalidSampleError(f"status at position {i} is not 0 or 1: {raw[i]!r}")
        object.__setattr__(self, "times", _frozen(times))
        object.__setattr__(self, "status", _frozen(raw.astype(np.int8)))

    @classmethod
    def from_pairs(cls, pairs) -> CensoredSample:
        pairs = list(pairs)
        if not pairs:
            raise InvalidSampleError("empty sample")
        t, d = zip(*pairs)
        return cls(np.asarray(t, dtype=float), np.asarray(d))

    @classmethod
    def uncensored(cls, values: ArrayLike) -> CensoredSample:
        values = np.asarray(values, dtype=float)
        return cls(values, np.ones(values.shape, dtype=np.int8))

    def __len__(self) -> int:
        return self.times.size

    @property
    def n(self) -> int:
        return self.times.size

    @property
    def n_events(self) -> int:
        return int(self.status.sum())

    def flipped(self) -> CensoredSample:
        """Same times with every status inverted."""
        return CensoredSample(self.times, 1 - self.status)


@dataclass(frozen=True)
class StepSurvival:
    """Right-continuous nonincreasing step function starting at 1.

    ``values_after[k]`` is the value on ``[jump_times[k], jump_times[k+1])``.
    """

    jump_times: NDArray[np.float64]
    values_after: NDArray[np.float64]
    value_before_first: float = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jump_times, t, side="right")
        out = np.where(idx == 0, self.value_before_first, self._padded()[idx])
        return out if out.ndim else float(out)

    def left_limit(self, t):
        """Value held immediately before ``t``."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jump_times, t, side="left")
        out = np.where(idx == 0, self.value_before_first, self._padded()[idx])
        return out if out.ndim else float(out)

    def _padded(self) -> NDArray[np.float64]:
        # index k of the padded array is the value after k jumps
        return np.concatenate(([self.value_before_first], self.values_after))


def km_censoring_survival(cs: CensoredSample) -> StepSurvival:
    """Reverse Kaplan-Meier estimate of the censoring survival function.

    Censorings (status 0) are the events of interest. At tied times the
    lifetime events are taken to happen first, so they are not at risk of
    censoring at that time: the risk set at a censoring time ``c`` is
    ``#{Y > c} + #{Y == c, status == 0}``.
    """
    if not isinstance(cs, CensoredSample):
        raise InvalidSampleError(f"expected a CensoredSample, got {type(cs).__name__}")
    times = cs.times
    cens_times, d = np.unique(times[cs.status == 0], return_counts=True)
    if cens_times.size == 0:
        empty = _frozen(np.empty(0))
        return StepSurvival(empty, empty)
    ordered = np.sort(times)
    above = ordered.size - np.searchsorted(ordered, cens_times, side="right")
    at_risk = above + d
    values = np.cumprod(1.0 - d / at_risk)
    return StepSurvival(_frozen(cens_times), _frozen(values))


def left_limit(k: StepSurvival, t):
    """``k(t-)``; equals 1 for ``t`` at or before the first jump."""
    return k.left_limit(t)


@dataclass(frozen=True)
class EmpiricalDistribution:
    backing: SortedSample
    direction: Literal["cdf", "survival"] = "cdf"

    def __call__(self, x):
        ordered = self.backing.ordered
        frac = np.searchsorted(ordered, np.asarray(x, dtype=float), side="right") / ordered.size
        out = frac if self.direction == "cdf" else 1.0 - frac
        return out if np.ndim(out) else float(out)


def empirical_cdf(s: SortedSample | Sample | ArrayLike, x):
    """Fraction of the sample at or below ``x``."""
    if not isinstance(s, SortedSample):
        s = sort_sample(s)
    return EmpiricalDistribution(s, "cdf")(x)
