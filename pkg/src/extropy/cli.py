"""Command-line interface.

Exit codes: 0 success, 2 invalid input or arguments, 3 estimator failure
(too few events, degenerate censoring weights, unstable bootstrap).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .complete import (
    EstimateResult,
    estimate_ce,
    estimate_ce_plugin,
    estimate_cre,
    estimate_cre_plugin,
    estimate_dynamic_cumulative_extropy,
    estimate_dynamic_survival_extropy,
    estimate_weighted_cumulative_extropy,
    estimate_weighted_dynamic_cumulative_extropy,
    estimate_weighted_dynamic_survival_extropy,
    estimate_weighted_survival_extropy,
)
from .censored import estimate_ce_censored, estimate_cre_censored
from .datasets import Dataset, fixture_info, fixture_names, load_fixture, read_dataset
from .errors import ExtropyError, FixtureError, InvalidSampleError
from .inference import DEFAULT_N_BOOT, InferenceResult, bootstrap_censored, variance_complete
from .oracles import Distribution, Family

EXIT_OK, EXIT_USAGE, EXIT_ESTIMATOR = 0, 2, 3
DEFAULT_SEED = 20240101
SEED_ENV = "EXTROPY_SEED"

COMPLETE_MEASURES = {
    "cre": estimate_cre,
    "ce": estimate_ce,
    "cre-plugin": estimate_cre_plugin,
    "ce-plugin": estimate_ce_plugin,
    "w-surv": estimate_weighted_survival_extropy,
    "w-cum": estimate_weighted_cumulative_extropy,
}
DYNAMIC_MEASURES = {
    "dyn-surv": estimate_dynamic_survival_extropy,
    "dyn-cum": estimate_dynamic_cumulative_extropy,
    "w-dyn-surv": estimate_weighted_dynamic_survival_extropy,
    "w-dyn-cum": estimate_weighted_dynamic_cumulative_extropy,
}
CENSORED_MEASURES = {"cre": estimate_cre_censored, "ce": estimate_ce_censored}
ALL_MEASURES = [*COMPLETE_MEASURES, *DYNAMIC_MEASURES]

DIST_NAMES = {
    "exp": Family.EXPONENTIAL,
    "exponential": Family.EXPONENTIAL,
    "gamma": Family.GAMMA,
    "weibull": Family.WEIBULL,
    "lognormal": Family.LOGNORMAL,
}


class UsageError(Exception):
    pass


def _csv_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def write_atomic(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _emit(text: str, output: str | None) -> None:
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def report_document(
    name: str,
    result: EstimateResult,
    inference: InferenceResult | None,
    n_events: int,
) -> dict:
    doc = {
        "measure": result.measure.value,
        "name": name,
        "estimate": result.value,
        "method": result.method,
        "n": result.n_used,
        "n_events": n_events,
    }
    if result.threshold_t is not None:
        doc["t"] = result.threshold_t
    if inference is not None:
        doc["std_error"] = inference.std_error
        doc["ci"] = [inference.ci_lower, inference.ci_upper]
        doc["level"] = inference.level
        doc["ci_method"] = inference.method.value
        if inference.n_boot is not None:
            doc["n_boot"] = inference.n_boot
            doc["n_skipped"] = inference.n_skipped
            doc["seed"] = inference.seed
    doc["tool_version"] = __version__
    return doc


def _load_input(args) -> Dataset:
    if args.input and args.fixture:
        raise UsageError("give either --input or --fixture, not both")
    if args.fixture:
        return load_fixture(args.fixture)
    if args.input:
        return read_dataset(args.input)
    raise UsageError("one of --input or --fixture is required")


def cmd_estimate(args) -> int:
    ds = _load_input(args)
    measures = _csv_list(args.measures)
    if not measures:
        raise UsageError("--measures is empty")
    unknown = [m for m in measures if m not in ALL_MEASURES]
    if unknown:
        raise UsageError(f"unknown measure(s) {unknown}; choose from {', '.join(ALL_MEASURES)}")
    censored = args.censored
    if censored and ds.status is None:
        raise UsageError("--censored needs a 'status' column in the input")
    if not censored and ds.n_censored:
        raise UsageError(f"input has {ds.n_censored} censored rows; pass --censored")
    if censored:
        bad = [m for m in measures if m not in CENSORED_MEASURES]
        if bad:
            raise UsageError(f"measure(s) {bad} are not available for censored data")
        if args.ci == "projection":
            raise UsageError("--ci projection is for complete data; use --ci bootstrap")
    elif args.ci == "bootstrap":
        raise UsageError("--ci bootstrap is for censored data; use --ci projection")
    if args.ci == "projection":
        bad = [m for m in measures if m not in ("cre", "ce")]
        if bad:
            raise UsageError(f"--ci projection is only available for cre and ce, not {bad}")
    if any(m in DYNAMIC_MEASURES for m in measures) and args.t is None:
        raise UsageError("dynamic measures need --t")
    if not 0.0 < args.level < 1.0:
        raise UsageError(f"--level must lie in (0, 1), got {args.level}")
    if args.boot < 100:
        raise UsageError(f"--boot must be at least 100, got {args.boot}")
    seed = _resolve_seed(args.seed)

    lines = []
    if censored:
        cs = ds.censored_sample()
        for m in measures:
            result = CENSORED_MEASURES[m](cs)
            inf = None
            if args.ci == "bootstrap":
                inf = bootstrap_censored(cs, m.upper(), n_boot=args.boot, level=args.level, seed=seed)
            lines.append(report_document(m, result, inf, cs.n_events))
    else:
        s = ds.sample()
        for m in measures:
            if m in DYNAMIC_MEASURES:
                result = DYNAMIC_MEASURES[m](s, args.t)
            else:
                result = COMPLETE_MEASURES[m](s)
            inf = variance_complete(s, m.upper(), args.level) if args.ci == "projection" else None
            lines.append(report_document(m, result, inf, s.n))
    _emit("".join(json.dumps(doc) + "\n" for doc in lines), args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    # imported lazily: pulls in the process pool machinery
    from .simulation import (
        DESK_REPLICATIONS,
        FULL_REPLICATIONS,
        ExperimentSpec,
        report_csv,
        reproduce_table,
        run_experiment,
    )

    seed = _resolve_seed(args.seed)
    reps = args.reps if args.reps is not None else (FULL_REPLICATIONS if args.full else DESK_REPLICATIONS)
    if reps < 100:
        raise UsageError(f"--reps must be at least 100, got {reps}")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")

    if args.table is not None:
        result = reproduce_table(args.table, replications=reps, master_seed=seed, workers=args.workers)
        csv_text, json_text = result.to_csv(), result.to_json()
    else:
        if args.dist is None:
            raise UsageError("--dist is required unless --table is given")
        family = DIST_NAMES.get(args.dist.lower())
        if family is None:
            raise UsageError(f"unknown distribution {args.dist!r}; choose from exp, gamma, weibull, lognormal")
        try:
            params = tuple(float(p) for p in _csv_list(args.params)) if args.params else (1.0,)
            n_values = tuple(int(v) for v in _csv_list(args.n))
        except ValueError as exc:
            raise UsageError(f"bad numeric list: {exc}") from None
        if args.estimators:
            estimators = tuple(_csv_list(args.estimators))
        else:
            estimators = ("T1c", "T2c") if args.censor_frac is not None else ("T1", "T2")
        try:
            spec = ExperimentSpec(
                distribution=Distribution(family, params),
                n_values=n_values,
                replications=reps,
                estimators=estimators,
                censor_fraction=args.censor_frac,
                master_seed=seed,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        report = run_experiment(spec, workers=args.workers)
        csv_text, json_text = report_csv([report]), report.to_json() + "\n"

    if args.csv:
        write_atomic(args.csv, csv_text)
    if args.json:
        write_atomic(args.json, json_text)
    if not args.csv and not args.json:
        sys.stdout.write(json_text if args.format == "json" else csv_text)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.show:
        ds = load_fixture(args.show)
        rows = ["time" + (",status" if ds.status is not None else "")]
        for i, t in enumerate(ds.times):
            rows.append(repr(float(t)) + (f",{ds.status[i]}" if ds.status is not None else ""))
        sys.stdout.write("\n".join(rows) + "\n")
        return EXIT_OK
    for name in fixture_names():
        info = fixture_info(name)
        state = "vendored" if info["enabled"] else f"disabled ({info['disabled_reason']})"
        sys.stdout.write(f"{name}\t{info['rows']} rows\t{state}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extropy",
        description="Estimate cumulative residual extropy and negative cumulative extropy.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate measures from a dataset")
    est.add_argument("--input", help="CSV with a 'time' column and optional 'status' column")
    est.add_argument("--fixture", help=f"vendored dataset ({', '.join(fixture_names())})")
    est.add_argument("--measures", default="cre,ce", help=f"comma list from: {', '.join(ALL_MEASURES)}")
    est.add_argument("--t", type=float, help="threshold for the dynamic measures")
    est.add_argument("--censored", action="store_true", help="use the status column and IPCW estimators")
    est.add_argument("--ci", choices=("none", "projection", "bootstrap"), default="none")
    est.add_argument("--level", type=float, default=0.95)
    est.add_argument("--boot", type=int, default=DEFAULT_N_BOOT, help="bootstrap replicates")
    est.add_argument("--seed", type=int, help=f"bootstrap seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    est.add_argument("--output", help="write JSON lines here instead of stdout")
    est.set_defaults(func=cmd_estimate)

    sim = sub.add_parser("simulate", help="Monte Carlo bias/MSE study")
    sim.add_argument("--table", type=int, choices=(1, 2, 3, 4), help="reproduce a simulation table")
    sim.add_argument("--dist", help="exp, gamma, weibull or lognormal")
    sim.add_argument("--params", help="comma list: rate | shape,rate | shape,scale | mu,sigma")
    sim.add_argument("--n", default="10,20,30,40,50", help="comma list of sample sizes")
    sim.add_argument("--reps", type=int, help="replications (default 2000; 10000 with --full)")
    sim.add_argument("--full", action="store_true", help="use 10000 replications")
    sim.add_argument("--censor-frac", type=float, help="target censored fraction P(X > C)")
    sim.add_argument("--estimators", help="comma list: T1, T2, TT1, TT2, GAP, T1c, T2c, T1c_known_k, T2c_known_k")
    sim.add_argument("--seed", type=int, help=f"master seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--format", choices=("csv", "json"), default="csv", help="stdout format")
    sim.add_argument("--csv", help="write the CSV report here")
    sim.add_argument("--json", help="write the JSON report here")
    sim.set_defaults(func=cmd_simulate)

    fx = sub.add_parser("fixtures", help="list vendored datasets")
    fx.add_argument("--show", metavar="NAME", help="print a fixture as CSV")
    fx.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidSampleError, FixtureError) as exc:
        print(f"extropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExtropyError as exc:
        print(f"extropy: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR


if __name__ == "__main__":
    sys.exit(main())
