import json
import math

import numpy as np
import pytest

from extropy import Distribution
from extropy.oracles import ustat_variance
from extropy.simulation import (
    ExperimentSpec,
    reproduce_table,
    run_experiment,
    sample_distribution,
)

EXP = Distribution.exponential(1.0)


class TestSampling:
    @pytest.mark.parametrize(
        "d",
        [EXP, Distribution.gamma(2.0, 1.0), Distribution.gamma(2.5, 2.0),
         Distribution.weibull(2.0, 1.0), Distribution.lognormal(0.0, 1.0)],
        ids=lambda d: d.label,
    )
    def test_moments(self, d):
        n = 1_000_000
        x = sample_distribution(d, n, np.random.default_rng(3)).values
        assert abs(x.mean() - d.mean) < 4 * math.sqrt(d.variance / n)
        # variance of the sample variance needs the fourth moment; 2% is ample at 1e6 draws
        assert x.var() == pytest.approx(d.variance, rel=0.02 if d.family.value != "LOGNORMAL" else 0.1)

    def test_gamma_two_one_variance(self):
        x = sample_distribution(Distribution.gamma(2.0, 1.0), 1_000_000, np.random.default_rng(4)).values
        assert x.var() == pytest.approx(2.0, rel=0.01)

    def test_deterministic(self):
        a = sample_distribution(EXP, 50, np.random.default_rng(9)).values
        b = sample_distribution(EXP, 50, np.random.default_rng(9)).values
        assert np.array_equal(a, b)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            sample_distribution(EXP, 0, np.random.default_rng(0))


class TestSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(replications=99), dict(n_values=(1, 10)), dict(n_values=()), dict(estimators=("T9",)),
         dict(estimators=("T1c",)), dict(censor_fraction=1.2), dict(estimators=())],
    )
    def test_invalid(self, kwargs):
        base = dict(distribution=EXP, n_values=(10,), replications=100, estimators=("T1",))
        base.update(kwargs)
        with pytest.raises(ValueError):
            ExperimentSpec(**base)


class TestRunExperiment:
    def test_determinism_across_workers(self):
        spec = ExperimentSpec(EXP, (10, 25), 300, ("T1", "T2", "T1c", "T2c"), 0.2, master_seed=11)
        one = run_experiment(spec, workers=1)
        three = run_experiment(spec, workers=3)
        assert one.to_json() == three.to_json()
        assert one == three

    def test_seed_changes_results(self):
        a = run_experiment(ExperimentSpec(EXP, (10,), 200, ("T1",), master_seed=1))
        b = run_experiment(ExperimentSpec(EXP, (10,), 200, ("T1",), master_seed=2))
        assert a.cell("T1", 10).bias != b.cell("T1", 10).bias

    def test_report_invariants(self):
        rep = run_experiment(ExperimentSpec(
            Distribution.gamma(2.0, 1.0), (10, 30), 1000, ("T1", "T2", "TT1", "TT2", "GAP"), master_seed=5))
        for c in rep.cells:
            assert c.mse >= c.bias**2 - 1e-15
            assert c.skipped == 0 and not c.flagged
        for n in (10, 30):
            for name in ("T1", "T2"):
                c = rep.cell(name, n)
                assert abs(c.bias) < 3 * c.mc_se
            gap = rep.cell("GAP", n)
            assert gap.mse == pytest.approx(2.0 / n, rel=0.10)
        assert rep.truths["T1"] == (pytest.approx(-0.625), "true_cre")

    def test_censored_fraction_and_rate(self):
        rep = run_experiment(ExperimentSpec(EXP, (50, 100), 500, ("T1c",), 0.2, master_seed=3))
        assert rep.censoring_rate == pytest.approx(0.25, rel=1e-7)
        assert abs(rep.realized_censored_fraction - 0.2) < 0.01

    def test_ce_unbiased_small_n(self):
        c = run_experiment(ExperimentSpec(EXP, (10,), 2000, ("T2",), master_seed=8)).cell("T2", 10)
        assert abs(c.bias) < 3 * c.mc_se

    def test_weibull_mse_matches_exact_variance(self):
        d = Distribution.weibull(2.0, 1.0)
        c = run_experiment(ExperimentSpec(d, (50,), 2000, ("T1",), master_seed=21)).cell("T1", 50)
        assert c.mse == pytest.approx(ustat_variance(d, "min", 50) / 4, rel=0.15)

    def test_skips_are_counted_and_flagged(self):
        rep = run_experiment(ExperimentSpec(EXP, (3,), 400, ("T1c",), 0.5, master_seed=0))
        c = rep.cell("T1c", 3)
        assert c.skipped > 100 and c.flagged
        assert c.n_used + c.skipped == 400

    def test_json_round_trip(self):
        rep = run_experiment(ExperimentSpec(EXP, (10,), 100, ("T1", "TT1"), master_seed=4))
        doc = json.loads(rep.to_json())
        assert doc["rows"][0]["bias"] == rep.cells[0].bias
        assert doc["truths"]["T1"]["value"] == -0.25


class TestReproduceTable:
    def test_table_one_layout(self):
        t = reproduce_table(1, replications=100, master_seed=7)
        assert len(t.rows) == 4 * 5 * 2
        assert {r.distribution for r in t.rows} == {"Exponential(1)", "Gamma(2,1)", "Weibull(2,1)", "Lognormal(0,1)"}
        row = next(r for r in t.rows if r.estimator == "TT1" and r.n == 10 and r.distribution == "Exponential(1)")
        assert row.printed_bias == 0.02541
        lines = t.to_csv().strip().splitlines()
        assert len(lines) == 41
        assert lines[0].startswith("distribution,estimator,n,bias,mse,mc_se,skipped")

    def test_table_four_is_informational(self):
        t = reproduce_table(4, replications=100, master_seed=7)
        assert {r.distribution for r in t.rows} >= {"Gamma(2,2)"}
        assert {r.bias_flag for r in t.rows} == {"informational"}
        assert {r.mse_flag for r in t.rows} == {"informational"}
        json.loads(t.to_json())

    def test_unknown_table(self):
        with pytest.raises(ValueError):
            reproduce_table(5)
