"""Monte Carlo bias/MSE harness for the extropy estimators.

Every replicate draws from its own generator keyed on
``(master_seed, n, replicate, purpose)``; results therefore do not depend on
how replicates are split across worker processes, and the reduction is done
in replicate order with :func:`math.fsum`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from . import __version__
from .censored import estimate_ce_censored, estimate_cre_censored
from .complete import estimate_ce, estimate_ce_plugin, estimate_cre, estimate_cre_plugin
from .errors import InsufficientEventsError, IpcwDegenerateError
from .oracles import Distribution, Family, calibrate_censoring_rate, true_ce, true_cre
from .samples import CensoredSample, Sample

__all__ = [
    "ESTIMATORS",
    "ExperimentSpec",
    "CellResult",
    "ExperimentReport",
    "sample_distribution",
    "run_experiment",
    "TableRow",
    "TableReproduction",
    "TABLE_SPECS",
    "PRINTED_TABLES",
    "reproduce_table",
]

MIN_REPLICATIONS = 100
DESK_REPLICATIONS = 2000
FULL_REPLICATIONS = 10_000
SKIP_FLAG_FRACTION = 0.05

LIFETIME, CENSORING = 0, 1


@dataclass(frozen=True)
class _Estimator:
    censored: bool
    truth: Callable[[Distribution], float]
    provenance: str
    known_k: bool = False


def _mean(d: Distribution) -> float:
    return d.mean


ESTIMATORS: dict[str, _Estimator] = {
    "T1": _Estimator(False, true_cre, "true_cre"),
    "T2": _Estimator(False, true_ce, "true_ce"),
    "TT1": _Estimator(False, true_cre, "true_cre"),
    "TT2": _Estimator(False, true_ce, "true_ce"),
    # T2 - T1 is exactly the sample mean
    "GAP": _Estimator(False, _mean, "distribution mean"),
    "T1c": _Estimator(True, true_cre, "true_cre"),
    "T2c": _Estimator(True, true_ce, "true_ce"),
    "T1c_known_k": _Estimator(True, true_cre, "true_cre", known_k=True),
    "T2c_known_k": _Estimator(True, true_ce, "true_ce", known_k=True),
}


@dataclass(frozen=True)
class ExperimentSpec:
    distribution: Distribution
    n_values: tuple[int, ...]
    replications: int = DESK_REPLICATIONS
    estimators: tuple[str, ...] = ("T1",)
    censor_fraction: float | None = None
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.replications < MIN_REPLICATIONS:
            raise ValueError(f"replications must be at least {MIN_REPLICATIONS}, got {self.replications}")
        if not self.n_values or min(self.n_values) < 2:
            raise ValueError(f"every n must be at least 2, got {self.n_values}")
        if not self.estimators:
            raise ValueError("no estimators requested")
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            raise ValueError(f"unknown estimator(s) {unknown}; choose from {sorted(ESTIMATORS)}")
        if self.censor_fraction is not None:
            if not 0.0 < self.censor_fraction < 1.0:
                raise ValueError(f"censor fraction must lie in (0, 1), got {self.censor_fraction}")
        elif any(ESTIMATORS[e].censored for e in self.estimators):
            raise ValueError("censored estimators need a censor fraction")


@dataclass(frozen=True)
class CellResult:
    estimator: str
    n: int
    bias: float
    mse: float
    mc_se: float
    n_used: int
    skipped: int
    truth: float
    flagged: bool


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    cells: tuple[CellResult, ...]
    truths: dict[str, tuple[float, str]]
    censoring_rate: float | None = None
    realized_censored_fraction: float | None = None

    def cell(self, estimator: str, n: int) -> CellResult:
        for c in self.cells:
            if c.estimator == estimator and c.n == n:
                return c
        raise KeyError((estimator, n))

    def to_dict(self) -> dict:
        spec = self.spec
        return {
            "distribution": spec.distribution.family.value,
            "params": list(spec.distribution.params),
            "label": spec.distribution.label,
            "n_values": list(spec.n_values),
            "replications": spec.replications,
            "estimators": list(spec.estimators),
            "censor_fraction": spec.censor_fraction,
            "master_seed": spec.master_seed,
            "censoring_rate": self.censoring_rate,
            "realized_censored_fraction": self.realized_censored_fraction,
            "truths": {k: {"value": v, "source": src} for k, (v, src) in self.truths.items()},
            "rows": [asdict(c) for c in self.cells],
            "tool_version": __version__,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


CSV_COLUMNS = ["distribution", "estimator", "n", "bias", "mse", "mc_se", "skipped",
               "truth", "censoring_rate"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_csv(reports: list[ExperimentReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for c in rep.cells:
            w.writerow([rep.spec.distribution.label, c.estimator, c.n, _fmt(c.bias), _fmt(c.mse),
                        _fmt(c.mc_se), c.skipped, _fmt(c.truth), _fmt(rep.censoring_rate)])
    return buf.getvalue()


def _uniforms(rng: np.random.Generator, size) -> np.ndarray:
    # random() lies in [0, 1); lift the lower end off 0 so every draw is positive
    return np.maximum(rng.random(size), 2.0**-53)


def sample_distribution(d: Distribution, n: int, rng: np.random.Generator) -> Sample:
    """``n`` i.i.d. draws from ``d``; deterministic for a given generator state."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if d.family is Family.EXPONENTIAL:
        x = -np.log(_uniforms(rng, n)) / d.params[0]
    elif d.family is Family.WEIBULL:
        k, scale = d.params
        x = scale * (-np.log(_uniforms(rng, n))) ** (1.0 / k)
    elif d.family is Family.LOGNORMAL:
        mu, sigma = d.params
        x = np.exp(mu + sigma * special.ndtri(_uniforms(rng, n)))
    else:
        shape, rate = d.params
        if float(shape).is_integer():
            e = -np.log(_uniforms(rng, (n, int(shape))))
            x = e.sum(axis=1) / rate
        else:
            x = rng.gamma(shape, 1.0 / rate, size=n)
    return Sample(x)


def _rng(seed: int, n: int, rep: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, rep, purpose)))


def _one(name: str, lifetimes: Sample, cs: CensoredSample | None, rate: float | None) -> float:
    if name == "T1":
        return estimate_cre(lifetimes).value
    if name == "T2":
        return estimate_ce(lifetimes).value
    if name == "TT1":
        return estimate_cre_plugin(lifetimes).value
    if name == "TT2":
        return estimate_ce_plugin(lifetimes).value
    if name == "GAP":
        return estimate_ce(lifetimes).value - estimate_cre(lifetimes).value
    known = None
    if ESTIMATORS[name].known_k:
        known = lambda t: np.exp(-rate * t)  # noqa: E731
    try:
        if name.startswith("T1c"):
            return estimate_cre_censored(cs, known).value
        return estimate_ce_censored(cs, known).value
    except (InsufficientEventsError, IpcwDegenerateError):
        return math.nan


def _simulate_chunk(spec: ExperimentSpec, rate: float | None, n: int, start: int, stop: int):
    est = np.empty((len(spec.estimators), stop - start))
    censored = 0
    for col, rep in enumerate(range(start, stop)):
        lifetimes = sample_distribution(spec.distribution, n, _rng(spec.master_seed, n, rep, LIFETIME))
        cs = None
        if rate is not None:
            c = _rng(spec.master_seed, n, rep, CENSORING).exponential(1.0 / rate, size=n)
            x = lifetimes.values
            status = (x <= c).astype(np.int8)
            censored += n - int(status.sum())
            cs = CensoredSample(np.minimum(x, c), status)
        for row, name in enumerate(spec.estimators):
            est[row, col] = _one(name, lifetimes, cs, rate)
    return est, censored


def _chunks(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    edges = np.linspace(0, total, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentReport:
    """Bias, MSE and Monte Carlo standard error per (estimator, n) cell.

    Censored estimators that fail on a replicate (fewer than two events, or a
    zero censoring-survival estimate at an event) are skipped and counted; a
    cell with more than 5% skipped is flagged.
    """
    d = spec.distribution
    truths = {}
    for name in spec.estimators:
        e = ESTIMATORS[name]
        truths[name] = (float(e.truth(d)), e.provenance)
    rate = None
    if spec.censor_fraction is not None:
        rate = calibrate_censoring_rate(d, spec.censor_fraction)

    cells = []
    total_censored = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for n in spec.n_values:
            jobs = _chunks(spec.replications, workers)
            if pool is None:
                parts = [_simulate_chunk(spec, rate, n, a, b) for a, b in jobs]
            else:
                futures = [pool.submit(_simulate_chunk, spec, rate, n, a, b) for a, b in jobs]
                parts = [f.result() for f in futures]
            est = np.concatenate([p[0] for p in parts], axis=1)
            total_censored += sum(p[1] for p in parts)
            for row, name in enumerate(spec.estimators):
                cells.append(_aggregate(name, n, est[row], truths[name][0]))
    finally:
        if pool is not None:
            pool.shutdown()

    realized = None
    if rate is not None:
        realized = total_censored / (spec.replications * sum(spec.n_values))
    return ExperimentReport(spec, tuple(cells), truths, rate, realized)


def _aggregate(name: str, n: int, values: np.ndarray, truth: float) -> CellResult:
    ok = values[~np.isnan(values)]
    m = ok.size
    skipped = values.size - m
    if m == 0:
        nan = math.nan
        return CellResult(name, n, nan, nan, nan, 0, skipped, truth, True)
    err = (ok - truth).tolist()
    bias = math.fsum(err) / m
    mse = math.fsum(e * e for e in err) / m
    mean = math.fsum(ok.tolist()) / m
    var = math.fsum((v - mean) ** 2 for v in ok.tolist()) / (m - 1) if m > 1 else math.nan
    mc_se = math.sqrt(var / m)
    flagged = skipped > SKIP_FLAG_FRACTION * values.size
    return CellResult(name, n, bias, mse, mc_se, m, skipped, truth, flagged)


# Table layouts: distributions, n grid, estimators, censoring.
_T1_DISTS = (
    Distribution.exponential(1.0),
    Distribution.gamma(2.0, 1.0),
    Distribution.weibull(2.0, 1.0),
    Distribution.lognormal(0.0, 1.0),
)
_T4_DISTS = (
    Distribution.exponential(1.0),
    Distribution.gamma(2.0, 2.0),
    Distribution.weibull(2.0, 1.0),
    Distribution.lognormal(0.0, 1.0),
)
TABLE_SPECS = {
    1: dict(distributions=_T1_DISTS, n_values=(10, 20, 30, 40, 50), estimators=("T1", "TT1"), censor=None),
    2: dict(distributions=_T1_DISTS, n_values=(50, 75, 100, 200), estimators=("T1c",), censor=0.2),
    3: dict(distributions=_T1_DISTS, n_values=(10, 20, 30, 40, 50), estimators=("T2", "TT2"), censor=None),
    4: dict(distributions=_T4_DISTS, n_values=(50, 75, 100, 200), estimators=("T2c",), censor=0.2),
}

# Printed (bias, MSE) pairs keyed by (table, distribution label, estimator, n).
_PRINTED_RAW = {
    1: {
        "Exponential(1)": {
            "T1": [(0.00076, 0.00879), (0.00074, 0.00416), (0.00038, 0.00274), (0.00018, 0.00211), (0.00004, 0.00164)],
            "TT1": [(0.02541, 0.00776), (0.01283, 0.00398), (0.00861, 0.00263), (0.01283, 0.00202), (0.02541, 0.00160)],
        },
        "Gamma(2,1)": {
            "T1": [(0.00199, 0.02647), (0.00168, 0.01270), (0.00124, 0.00851), (0.00094, 0.00638), (0.00036, 0.00507)],
            "TT1": [(0.19588, 0.05776), (0.13943, 0.03153), (0.11270, 0.02151), (0.09819, 0.01632), (0.08221, 0.01348)],
        },
        "Weibull(2,1)": {
            "T1": [(0.00078, 0.00431), (0.00058, 0.00217), (0.00054, 0.00142), (0.00017, 0.00104), (0.00001, 0.00087)],
            "TT1": [(0.12641, 0.01951), (0.09280, 0.01105), (0.07621, 0.00764), (0.06703, 0.00600), (0.05987, 0.00484)],
        },
        "Lognormal(0,1)": {
            "T1": [(0.00115, 0.01765), (0.00098, 0.00844), (0.00049, 0.00546), (0.00030, 0.00410), (0.00024, 0.00325)],
            "TT1": [(0.08175, 0.02327), (0.06710, 0.01264), (0.05867, 0.00892), (0.05367, 0.00705), (0.04867, 0.00572)],
        },
    },
    2: {
        "Exponential(1)": {"T1c": [(0.08418, 0.00830), (0.08287, 0.00788), (0.08222, 0.00761), (0.08199, 0.00741)]},
        "Gamma(2,1)": {"T1c": [(0.17328, 0.04083), (0.17321, 0.03822), (0.17318, 0.03735), (0.17309, 0.03585)]},
        "Weibull(2,1)": {"T1c": [(0.08358, 0.00914), (0.08128, 0.00852), (0.07956, 0.00807), (0.07942, 0.00762)]},
        "Lognormal(0,1)": {"T1c": [(0.26264, 0.07059), (0.26235, 0.06979), (0.26228, 0.06956), (0.26189, 0.06895)]},
    },
    3: {
        "Exponential(1)": {
            "T2": [(0.00118, 0.01473), (0.00098, 0.00722), (0.00050, 0.00491), (0.00038, 0.00356), (0.00037, 0.00297)],
            "TT2": [(0.03877, 0.01455), (0.01938, 0.00719), (0.00861, 0.00488), (0.01283, 0.00357), (0.02541, 0.00295)],
        },
        "Gamma(2,1)": {
            "T2": [(0.00074, 0.02564), (0.00052, 0.01243), (0.00036, 0.00827), (0.00032, 0.00649), (0.00028, 0.00493)],
            "TT2": [(0.13489, 0.04161), (0.08878, 0.02026), (0.06992, 0.01344), (0.05864, 0.01025), (0.05128, 0.00783)],
        },
        "Weibull(2,1)": {
            "T2": [(0.00098, 0.00845), (0.00092, 0.00419), (0.00031, 0.00281), (0.00013, 0.00210), (0.00001, 0.00165)],
            "TT2": [(0.15349, 0.03316), (0.10558, 0.01656), (0.08592, 0.01120), (0.07303, 0.00828), (0.06441, 0.00655)],
        },
        "Lognormal(0,1)": {
            "T2": [(0.00764, 0.35391), (0.00430, 0.18710), (0.00385, 0.12033), (0.00064, 0.08892), (0.00044, 0.07305)],
            "TT2": [(0.16508, 0.34391), (0.10203, 0.18699), (0.08764, 0.12357), (0.07814, 0.09248), (0.06620, 0.07591)],
        },
    },
    4: {
        "Exponential(1)": {"T2c": [(0.19183, 0.04122), (0.19056, 0.03923), (0.19048, 0.03834), (0.18831, 0.03646)]},
        "Gamma(2,2)": {"T2c": [(0.28382, 0.09566), (0.28137, 0.08928), (0.27948, 0.08552), (0.27659, 0.08010)]},
        "Weibull(2,1)": {"T2c": [(0.11409, 0.02219), (0.10925, 0.01876), (0.10690, 0.01792), (0.10540, 0.01546)]},
        "Lognormal(0,1)": {"T2c": [(0.00712, 0.04865), (0.00639, 0.03171), (0.00447, 0.02334), (0.00227, 0.01142)]},
    },
}

PRINTED_TABLES: dict[tuple[int, str, str, int], tuple[float, float]] = {
    (table, label, est, n): pair
    for table, by_dist in _PRINTED_RAW.items()
    for label, by_est in by_dist.items()
    for est, pairs in by_est.items()
    for n, pair in zip(TABLE_SPECS[table]["n_values"], pairs)
}

# Columns whose printed values are known not to be reproducible; compared but not judged.
_INFORMATIONAL = {
    (2, "bias"), (2, "mse"),
    (3, "mse"),
    (4, "bias"), (4, "mse"),
}
MSE_REL_TOL = 0.10


@dataclass(frozen=True)
class TableRow:
    distribution: str
    estimator: str
    n: int
    bias: float
    mse: float
    mc_se: float
    skipped: int
    truth: float
    printed_bias: float
    printed_mse: float
    bias_flag: str
    mse_flag: str


@dataclass(frozen=True)
class TableReproduction:
    table: int
    replications: int
    master_seed: int
    reports: tuple[ExperimentReport, ...]
    rows: tuple[TableRow, ...] = field(default=())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(TableRow.__dataclass_fields__)
        w.writerow(names)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, k)) for k in names])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "table": self.table,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "rows": [asdict(r) for r in self.rows],
            "reports": [r.to_dict() for r in self.reports],
            "tool_version": __version__,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _flags(table: int, cell: CellResult, replications: int, printed: tuple[float, float]) -> tuple[str, str]:
    p_bias, p_mse = printed
    # printed biases are magnitudes; the published MC error is sd / 100
    se_printed = cell.mc_se * math.sqrt(replications / FULL_REPLICATIONS)
    se = math.hypot(cell.mc_se, se_printed)
    bias_ok = abs(abs(cell.bias) - p_bias) <= 3.0 * se
    mse_ok = abs(cell.mse - p_mse) <= MSE_REL_TOL * p_mse
    bias_flag = "informational" if (table, "bias") in _INFORMATIONAL else ("agree" if bias_ok else "disagree")
    mse_flag = "informational" if (table, "mse") in _INFORMATIONAL else ("agree" if mse_ok else "disagree")
    return bias_flag, mse_flag


def reproduce_table(
    table: int, replications: int = DESK_REPLICATIONS, master_seed: int = 0, workers: int = 1
) -> TableReproduction:
    """Run the canonical layout of a simulation table and line it up with the printed values."""
    table = int(table)
    if table not in TABLE_SPECS:
        raise ValueError(f"unknown table {table}; choose from {sorted(TABLE_SPECS)}")
    layout = TABLE_SPECS[table]
    reports, rows = [], []
    for d in layout["distributions"]:
        spec = ExperimentSpec(
            distribution=d,
            n_values=layout["n_values"],
            replications=replications,
            estimators=layout["estimators"],
            censor_fraction=layout["censor"],
            master_seed=master_seed,
        )
        rep = run_experiment(spec, workers=workers)
        reports.append(rep)
        for c in rep.cells:
            printed = PRINTED_TABLES[(table, d.label, c.estimator, c.n)]
            bf, mf = _flags(table, c, replications, printed)
            rows.append(TableRow(d.label, c.estimator, c.n, c.bias, c.mse, c.mc_se, c.skipped,
                                 c.truth, printed[0], printed[1], bf, mf))
    return TableReproduction(table, replications, master_seed, tuple(reports), tuple(rows))
