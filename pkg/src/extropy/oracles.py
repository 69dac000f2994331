"""Ground truths for the simulation families.

Exponential and Weibull have closed forms; gamma and lognormal are
integrated numerically. ``method="quadrature"`` forces the numeric route for
any family so the two can be cross-checked.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special, stats

from .errors import CalibrationError, InsufficientDataError, NumericError
from .samples import as_sample

__all__ = [
    "Family",
    "Distribution",
    "PairKernel",
    "true_cre",
    "true_ce",
    "true_weighted_survival_extropy",
    "true_weighted_cumulative_extropy",
    "ustat_variance",
    "naive_pairwise_oracle",
    "censored_fraction",
    "calibrate_censoring_rate",
]

QUAD_TOL = 1e-10
UPPER_TAIL = 1e-12


class Family(str, enum.Enum):
    EXPONENTIAL = "EXPONENTIAL"
    GAMMA = "GAMMA"
    WEIBULL = "WEIBULL"
    LOGNORMAL = "LOGNORMAL"


_ARITY = {Family.EXPONENTIAL: 1, Family.GAMMA: 2, Family.WEIBULL: 2, Family.LOGNORMAL: 2}


@dataclass(frozen=True)
class Distribution:
    """A lifetime family with its parameters.

    ``EXPONENTIAL(rate)``, ``GAMMA(shape, rate)``, ``WEIBULL(shape, scale)``,
    ``LOGNORMAL(mu, sigma)``.
    """

    family: Family
    params: tuple[float, ...]

    def __post_init__(self):
        family = Family(self.family)
        params = tuple(float(p) for p in self.params)
        if len(params) != _ARITY[family]:
            raise ValueError(f"{family.value} takes {_ARITY[family]} parameter(s), got {len(params)}")
        positive = params[1:] if family is Family.LOGNORMAL else params
        if not all(np.isfinite(params)) or any(p <= 0 for p in positive):
            raise ValueError(f"invalid {family.value} parameters {params}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)

    @classmethod
    def exponential(cls, rate: float = 1.0) -> Distribution:
        return cls(Family.EXPONENTIAL, (rate,))

    @classmethod
    def gamma(cls, shape: float, rate: float = 1.0) -> Distribution:
        return cls(Family.GAMMA, (shape, rate))

    @classmethod
    def weibull(cls, shape: float, scale: float = 1.0) -> Distribution:
        return cls(Family.WEIBULL, (shape, scale))

    @classmethod
    def lognormal(cls, mu: float = 0.0, sigma: float = 1.0) -> Distribution:
        return cls(Family.LOGNORMAL, (mu, sigma))

    @property
    def label(self) -> str:
        names = {
            Family.EXPONENTIAL: "Exponential",
            Family.GAMMA: "Gamma",
            Family.WEIBULL: "Weibull",
            Family.LOGNORMAL: "Lognormal",
        }
        return f"{names[self.family]}({','.join(f'{p:g}' for p in self.params)})"

    @cached_property
    def _frozen(self):
        a, *rest = self.params
        if self.family is Family.EXPONENTIAL:
            return stats.expon(scale=1.0 / a)
        if self.family is Family.GAMMA:
            return stats.gamma(a, scale=1.0 / rest[0])
        if self.family is Family.WEIBULL:
            return stats.weibull_min(a, scale=rest[0])
        return stats.lognorm(rest[0], scale=math.exp(a))

    def cdf(self, x):
        return self._frozen.cdf(x)

    def sf(self, x):
        return self._frozen.sf(x)

    def pdf(self, x):
        return self._frozen.pdf(x)

    def ppf(self, q):
        return self._frozen.ppf(q)

    def isf(self, q):
        return self._frozen.isf(q)

    def quantile(self, u: float) -> float:
        """Scalar quantile; closed form except for gamma."""
        a, *rest = self.params
        if self.family is Family.EXPONENTIAL:
            return -math.log1p(-u) / a
        if self.family is Family.WEIBULL:
            return rest[0] * (-math.log1p(-u)) ** (1.0 / a)
        if self.family is Family.LOGNORMAL:
            return math.exp(a + rest[0] * float(special.ndtri(u)))
        return float(self._frozen.ppf(u))

    @property
    def mean(self) -> float:
        return float(self._frozen.mean())

    @property
    def variance(self) -> float:
        return float(self._frozen.var())

    def scaled(self, c: float) -> Distribution:
        """Distribution of ``c * X``."""
        a, *rest = self.params
        if self.family is Family.EXPONENTIAL:
            return Distribution.exponential(a / c)
        if self.family is Family.GAMMA:
            return Distribution.gamma(a, rest[0] / c)
        if self.family is Family.WEIBULL:
            return Distribution.weibull(a, rest[0] * c)
        return Distribution.lognormal(a + math.log(c), rest[0])


def _quad(f, lo: float, hi: float) -> float:
    value, err = integrate.quad(f, lo, hi, epsabs=QUAD_TOL * 1e-2, epsrel=1e-13, limit=500)
    if not np.isfinite(value) or err > QUAD_TOL:
        raise NumericError(f"quadrature on [{lo}, {hi}] did not converge (error estimate {err:.3g})")
    return value


def _integrate_tail(d: Distribution, f) -> float:
    """Integral of ``f`` over (0, inf), split at the 1 - 1e-12 quantile."""
    upper = float(d.isf(UPPER_TAIL))
    body = 0.0
    # interior breakpoints keep quad from missing mass near the mode
    knots = [0.0, *sorted({float(d.ppf(q)) for q in (0.01, 0.25, 0.5, 0.75, 0.99)}), upper]
    for lo, hi in itertools.pairwise(knots):
        if hi > lo:
            body += _quad(f, lo, hi)
    tail = _quad(f, upper, np.inf)
    return body + tail


def _check_method(method: str) -> None:
    if method not in ("auto", "quadrature"):
        raise ValueError(f"method must be 'auto' or 'quadrature', got {method!r}")


def _closed_form_min_mean(d: Distribution) -> float | None:
    """``E[min(X1, X2)]`` where a closed form exists."""
    if d.family is Family.EXPONENTIAL:
        return 1.0 / (2.0 * d.params[0])
    if d.family is Family.WEIBULL:
        k, scale = d.params
        return scale * math.gamma(1.0 + 1.0 / k) * 2.0 ** (-1.0 / k)
    return None


def true_cre(d: Distribution, method: str = "auto") -> float:
    """``-(1/2) * integral of sf(x)^2``."""
    _check_method(method)
    if method == "auto" and (m := _closed_form_min_mean(d)) is not None:
        return -0.5 * m
    return -0.5 * _integrate_tail(d, lambda x: d.sf(x) ** 2)


def true_ce(d: Distribution, method: str = "auto") -> float:
    """``(1/2) * integral of 1 - cdf(x)^2``."""
    _check_method(method)
    if method == "auto" and (m := _closed_form_min_mean(d)) is not None:
        return d.mean - 0.5 * m

    def integrand(x):
        s = d.sf(x)
        # 1 - F^2 = S (2 - S), no cancellation in the upper tail
        return s * (2.0 - s)

    return 0.5 * _integrate_tail(d, integrand)


def true_weighted_survival_extropy(d: Distribution) -> float:
    """``-(1/2) * integral of x sf(x)^2 = -(1/4) E[min^2]``."""
    return -0.5 * _integrate_tail(d, lambda x: x * d.sf(x) ** 2)


def true_weighted_cumulative_extropy(d: Distribution) -> float:
    """``-(1/2) * integral of x (1 - cdf(x)^2) = -(1/4) E[max^2]``."""
    return -0.5 * _integrate_tail(d, lambda x: x * d.sf(x) * (2.0 - d.sf(x)))


def ustat_variance(d: Distribution, kernel: str, n: int) -> float:
    """Exact variance of the pair average of ``kernel`` (min or max) at size ``n``.

    ``2 (2 (n-2) zeta1 + zeta2) / (n (n-1))`` with ``zeta1`` the variance of the
    conditional mean given one coordinate and ``zeta2`` the kernel variance.
    The halved estimators have a quarter of this.
    """
    if kernel not in ("min", "max"):
        raise ValueError(f"kernel must be 'min' or 'max', got {kernel!r}")
    mean = d.mean
    e_min = -2.0 * true_cre(d)
    e_min2 = -4.0 * true_weighted_survival_extropy(d)
    second = d.variance + mean * mean

    def partial(x):
        # integral of sf over [0, x] = E[min(x, X)]
        return _quad(d.sf, 0.0, x) if x > 0 else 0.0

    if kernel == "min":
        theta = e_min
        g2 = _integrate_tail(d, lambda x: partial(x) ** 2 * d.pdf(x))
        k2 = e_min2
    else:
        theta = 2.0 * mean - e_min
        # E[max(x, X)] = x + mean - E[min(x, X)]
        g2 = _integrate_tail(d, lambda x: (x + mean - partial(x)) ** 2 * d.pdf(x))
        # E[max^2] = 2 E[X^2] - E[min^2]
        k2 = 2.0 * second - e_min2
    zeta1 = g2 - theta * theta
    zeta2 = k2 - theta * theta
    return 2.0 * (2.0 * (n - 2) * zeta1 + zeta2) / (n * (n - 1))


class PairKernel(str, enum.Enum):
    MIN = "MIN"
    MAX = "MAX"
    MIN2 = "MIN2"
    MAX2 = "MAX2"


def naive_pairwise_oracle(s, kernel: PairKernel | str) -> float:
    """Mean of ``kernel`` over all unordered pairs, by direct O(n^2) enumeration."""
    kernel = PairKernel(kernel)
    x = as_sample(s).values
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {n}", n)
    i, j = np.triu_indices(n, k=1)
    a, b = x[i], x[j]
    if kernel is PairKernel.MIN:
        vals = np.minimum(a, b)
    elif kernel is PairKernel.MAX:
        vals = np.maximum(a, b)
    elif kernel is PairKernel.MIN2:
        vals = np.minimum(a, b) ** 2
    else:
        vals = np.maximum(a, b) ** 2
    return math.fsum(vals.tolist()) / vals.size


def censored_fraction(d: Distribution, rate: float) -> float:
    """``P(X > C)`` for ``C ~ Exponential(rate)`` independent of ``X``.

    Equals ``1 - E[exp(-rate X)]``; evaluated in closed form for exponential
    and gamma lifetimes, otherwise by quadrature over the quantile scale.
    """
    if d.family is Family.EXPONENTIAL:
        return rate / (rate + d.params[0])
    if d.family is Family.GAMMA:
        shape, r = d.params
        return -math.expm1(shape * math.log1p(-rate / (r + rate)))
    value, err = integrate.quad(
        lambda u: -math.expm1(-rate * d.quantile(u)),
        0.0,
        1.0,
        points=(1e-9, 1e-6, 1e-3, 0.5, 1 - 1e-3, 1 - 1e-6),
        epsabs=1e-13,
        epsrel=1e-11,
        limit=500,
    )
    if not np.isfinite(value) or err > 1e-9:
        raise NumericError(f"censored fraction quadrature failed at rate {rate!r}")
    return value


def calibrate_censoring_rate(
    d: Distribution,
    target: float,
    *,
    lo: float = 1e-8,
    hi: float = 1e8,
    tol: float = 1e-8,
    max_iter: int = 300,
) -> float:
    """Exponential censoring rate giving ``P(X > C) = target``.

    Bisection on ``log(rate)``; the censored fraction increases with the rate.
    """
    target = float(target)
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {target!r}")
    a, b = math.log(lo), math.log(hi)
    fa = censored_fraction(d, lo) - target
    fb = censored_fraction(d, hi) - target
    if fa > 0 or fb < 0:
        raise CalibrationError(
            f"target {target} not bracketed by rates [{lo:g}, {hi:g}] "
            f"(fractions {fa + target:.3g}, {fb + target:.3g})"
        )
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        fm = censored_fraction(d, math.exp(mid)) - target
        if abs(fm) < tol:
            return math.exp(mid)
        if fm < 0:
            a = mid
        else:
            b = mid
    raise CalibrationError(f"bisection did not reach |P - target| < {tol:g}")
