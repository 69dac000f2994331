"""Standard errors and confidence intervals.

Complete data use the Hajek projection of the U-statistic kernel. For a
kernel ``-min/2`` (or ``max/2``) the asymptotic variance of ``sqrt(n)(T - theta)``
is ``4 * Var(h1)`` with ``h1`` the projection of the halved kernel, which is
``Var(E[min(X1, X2) | X1])``: the factor 4 and the squared 1/2 cancel. So
``Var-hat(T) = V / n`` with ``V`` the sample variance of the raw-kernel
projections. For exp(1) data ``n * Var(T1) -> 1/12``.

Censored data use a seeded nonparametric bootstrap over ``(time, status)``
pairs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .censored import estimate_ce_censored, estimate_cre_censored
from .complete import Measure, estimate_ce, estimate_cre
from .errors import (
    InsufficientDataError,
    InsufficientEventsError,
    IpcwDegenerateError,
    UnstableBootstrapError,
)
from .samples import CensoredSample, as_sample

__all__ = [
    "Kernel",
    "InferenceMethod",
    "InferenceResult",
    "projection_values",
    "variance_complete",
    "bootstrap_censored",
]

DEFAULT_N_BOOT = 1000
MAX_SKIP_FRACTION = 0.20


class Kernel(str, enum.Enum):
    MIN = "MIN"
    MAX = "MAX"


class InferenceMethod(str, enum.Enum):
    PROJECTION = "PROJECTION"
    BOOTSTRAP = "BOOTSTRAP"


@dataclass(frozen=True)
class InferenceResult:
    estimate: float
    std_error: float
    ci_lower: float
    ci_upper: float
    level: float
    method: InferenceMethod
    measure: Measure
    n: int
    n_events: int | None = None
    n_boot: int | None = None
    n_skipped: int = 0
    seed: int | None = None


def projection_values(s, kernel: Kernel | str) -> NDArray[np.float64]:
    """``(1/(n-1)) * sum_{j != i} kernel(X_i, X_j)`` for every ``i``, in input order."""
    kernel = Kernel(kernel)
    x = as_sample(s).values
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {n}", n)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    k = np.arange(n)
    if kernel is Kernel.MIN:
        # smaller partners contribute themselves, larger ones contribute xs[k]
        below = np.cumsum(xs) - xs
        sums = below + (n - 1 - k) * xs
    else:
        above = np.cumsum(xs[::-1])[::-1] - xs
        sums = above + k * xs
    out = np.empty(n)
    out[order] = sums / (n - 1)
    return out


def _normal_interval(estimate: float, se: float, level: float) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    return estimate - z * se, estimate + z * se


def _check_level(level: float) -> float:
    level = float(level)
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    return level


def variance_complete(s, measure: Measure | str = Measure.CRE, level: float = 0.95) -> InferenceResult:
    """Point estimate with projection standard error and normal interval."""
    measure = Measure(measure)
    level = _check_level(level)
    s = as_sample(s)
    n = s.n
    if n < 3:
        raise InsufficientDataError(f"need at least 3 observations for a variance, got {n}", n)
    if measure is Measure.CRE:
        est, kernel = estimate_cre(s).value, Kernel.MIN
    elif measure is Measure.CE:
        est, kernel = estimate_ce(s).value, Kernel.MAX
    else:
        raise ValueError(f"projection variance is only defined for CRE and CE, not {measure.value}")
    proj = projection_values(s, kernel)
    v = float(np.var(proj, ddof=1))
    se = math.sqrt(v / n)
    lo, hi = _normal_interval(est, se, level)
    return InferenceResult(est, se, lo, hi, level, InferenceMethod.PROJECTION, measure, n)


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for bootstrap replicate ``index``, independent of run order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def bootstrap_censored(
    cs: CensoredSample,
    measure: Measure | str = Measure.CRE,
    n_boot: int = DEFAULT_N_BOOT,
    level: float = 0.95,
    seed: int = 0,
) -> InferenceResult:
    """Percentile bootstrap interval for the IPCW estimators.

    Replicates with fewer than two events or a degenerate weight are skipped
    and counted; more than 20% skipped raises :class:`UnstableBootstrapError`.
    """
    measure = Measure(measure)
    level = _check_level(level)
    if measure is Measure.CRE:
        estimator = estimate_cre_censored
    elif measure is Measure.CE:
        estimator = estimate_ce_censored
    else:
        raise ValueError(f"bootstrap is only defined for CRE and CE, not {measure.value}")
    if n_boot < 100:
        raise ValueError(f"n_boot must be at least 100, got {n_boot}")
    point = estimator(cs)
    n = cs.n
    reps = np.full(n_boot, np.nan)
    skipped = 0
    for b in range(n_boot):
        idx = replicate_rng(seed, b).integers(0, n, size=n)
        try:
            reps[b] = estimator(CensoredSample(cs.times[idx], cs.status[idx])).value
        except (InsufficientEventsError, IpcwDegenerateError):
            skipped += 1
    if skipped > MAX_SKIP_FRACTION * n_boot:
        raise UnstableBootstrapError(
            f"{skipped} of {n_boot} bootstrap replicates were degenerate", skipped, n_boot
        )
    reps = reps[~np.isnan(reps)]
    alpha = 1.0 - level
    lo, hi = np.quantile(reps, [alpha / 2.0, 1.0 - alpha / 2.0])
    return InferenceResult(
        estimate=point.value,
        std_error=float(np.std(reps, ddof=1)),
        ci_lower=float(lo),
        ci_upper=float(hi),
        level=level,
        method=InferenceMethod.BOOTSTRAP,
        measure=measure,
        n=n,
        n_events=point.n_events,
        n_boot=n_boot,
        n_skipped=skipped,
        seed=seed,
    )
