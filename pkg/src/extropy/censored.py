"""Inverse-probability-of-censoring weighted U-statistics for right-censored data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .complete import EstimateResult, Measure
from .errors import InsufficientEventsError, InvalidSampleError, IpcwDegenerateError
from .samples import CensoredSample, km_censoring_survival

__all__ = [
    "IpcwWeights",
    "ipcw_weights",
    "estimate_cre_censored",
    "estimate_ce_censored",
]

# Maps an array of times to the censoring survival just before each time.
CensoringSurvival = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class IpcwWeights:
    weights: NDArray[np.float64]
    degenerate_flags: NDArray[np.bool_]

    @property
    def any_degenerate(self) -> bool:
        return bool(self.degenerate_flags.any())


def ipcw_weights(
    cs: CensoredSample,
    censoring_survival: CensoringSurvival | None = None,
    *,
    strict: bool = True,
) -> IpcwWeights:
    """Per-observation weights ``status / K(time-)``.

    ``K`` is the reverse Kaplan-Meier curve of ``cs`` unless a known
    censoring survival function is passed as ``censoring_survival`` (it must
    return left limits). Censored rows get weight 0. An event whose ``K(time-)``
    is 0 raises :class:`IpcwDegenerateError` when ``strict``; otherwise its
    weight is ``inf`` and it is flagged.
    """
    if not isinstance(cs, CensoredSample):
        raise InvalidSampleError(f"expected a CensoredSample, got {type(cs).__name__}")
    if censoring_survival is None:
        k_minus = km_censoring_survival(cs).left_limit(cs.times)
    else:
        k_minus = np.asarray(censoring_survival(cs.times), dtype=float)
    k_minus = np.broadcast_to(k_minus, cs.times.shape)
    events = cs.status == 1
    degenerate = events & (k_minus <= 0.0)
    if strict and degenerate.any():
        t = float(cs.times[np.flatnonzero(degenerate)[0]])
        raise IpcwDegenerateError(
            f"censoring survival estimate is 0 just before event time {t!r}", t
        )
    with np.errstate(divide="ignore"):
        w = np.where(events, 1.0 / np.where(degenerate, 0.0, k_minus), 0.0)
    return IpcwWeights(w, degenerate)


def _weighted_pair_sum(cs: CensoredSample, w: NDArray[np.float64], kernel: str) -> float:
    order = np.argsort(cs.times, kind="stable")
    y = cs.times[order]
    w = w[order]
    if kernel == "min":
        # each value is the minimum of every pair it forms with a later one
        partner = np.cumsum(w[::-1])[::-1] - w
    else:
        partner = np.cumsum(w) - w
    return math.fsum(y * w * partner)


def _estimate(cs, censoring_survival, kernel: str, sign: float, measure: Measure) -> EstimateResult:
    if not isinstance(cs, CensoredSample):
        raise InvalidSampleError(f"expected a CensoredSample, got {type(cs).__name__}")
    n, events = cs.n, cs.n_events
    if events < 2:
        raise InsufficientEventsError(f"need at least 2 events, got {events}", events)
    w = ipcw_weights(cs, censoring_survival).weights
    value = sign * _weighted_pair_sum(cs, w, kernel) / (n * (n - 1))
    method = "ipcw-u-statistic" if censoring_survival is None else "ipcw-u-statistic-known-k"
    return EstimateResult(measure, value, n, n_events=events, method=method)


def estimate_cre_censored(
    cs: CensoredSample, censoring_survival: CensoringSurvival | None = None
) -> EstimateResult:
    """IPCW estimator of cumulative residual extropy.

    ``-(1/(n(n-1))) * sum over unordered event pairs of min(Y_i, Y_j) w_i w_j``
    where ``n`` counts censored rows too.
    """
    return _estimate(cs, censoring_survival, "min", -1.0, Measure.CRE)


def estimate_ce_censored(
    cs: CensoredSample, censoring_survival: CensoringSurvival | None = None
) -> EstimateResult:
    """IPCW estimator of negative cumulative extropy (max kernel, positive sign)."""
    return _estimate(cs, censoring_survival, "max", 1.0, Measure.CE)
