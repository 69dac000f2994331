import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from extropy import (
    CensoredSample,
    InferenceMethod,
    InsufficientDataError,
    Measure,
    UnstableBootstrapError,
    bootstrap_censored,
    naive_pairwise_oracle,
    projection_values,
    variance_complete,
)


def brute_projection(values, kernel):
    x = np.asarray(values, dtype=float)
    return np.array([
        np.mean([kernel(x[i], x[j]) for j in range(x.size) if j != i]) for i in range(x.size)
    ])


class TestProjection:
    def test_hand_examples(self):
        assert_allclose(projection_values([1, 2, 3], "MIN"), [1.0, 1.5, 1.5])
        assert_allclose(projection_values([1, 2, 3], "MAX"), [2.5, 2.5, 3.0])
        assert_allclose(projection_values([4.0, 4.0], "MIN"), [4.0, 4.0])
        assert_allclose(projection_values([4.0, 4.0], "MAX"), [4.0, 4.0])

    def test_input_order_preserved(self):
        assert_allclose(projection_values([3, 1, 2], "MIN"), [1.5, 1.0, 1.5])

    @given(st.lists(st.floats(0.01, 100), min_size=2, max_size=40))
    def test_matches_brute_force(self, values):
        assert_allclose(projection_values(values, "MIN"), brute_projection(values, min), rtol=1e-12)
        assert_allclose(projection_values(values, "MAX"), brute_projection(values, max), rtol=1e-12)

    @given(st.lists(st.floats(0.01, 100), min_size=2, max_size=80))
    def test_mean_is_pair_mean(self, values):
        assert np.mean(projection_values(values, "MIN")) == pytest.approx(
            naive_pairwise_oracle(values, "MIN"), rel=1e-12)
        assert np.mean(projection_values(values, "MAX")) == pytest.approx(
            naive_pairwise_oracle(values, "MAX"), rel=1e-12)

    def test_too_small(self):
        with pytest.raises(InsufficientDataError):
            projection_values([1.0], "MIN")


class TestVarianceComplete:
    def test_constant_sample(self):
        r = variance_complete([2.0] * 6, Measure.CRE)
        assert r.std_error == 0.0
        assert r.ci_lower == r.ci_upper == r.estimate == -1.0

    def test_needs_three(self):
        with pytest.raises(InsufficientDataError):
            variance_complete([1.0, 2.0])

    def test_rejects_other_measures(self):
        with pytest.raises(ValueError):
            variance_complete([1.0, 2.0, 3.0], Measure.W_SURV_EXTROPY)

    def test_interval_is_symmetric(self, rng):
        x = rng.exponential(size=40)
        r = variance_complete(x, "CE", level=0.9)
        assert r.method is InferenceMethod.PROJECTION
        assert r.ci_lower < r.estimate < r.ci_upper
        assert r.estimate - r.ci_lower == pytest.approx(r.ci_upper - r.estimate)
        assert r.ci_upper - r.estimate == pytest.approx(1.6448536269514722 * r.std_error)

    def test_exponential_anchors(self, rng):
        # Var(1 - exp(-X)) = 1/12 for the min kernel; Var(X + exp(-X)) = 7/12 for max
        n = 40_000
        x = rng.exponential(size=n)
        cre = variance_complete(x, "CRE")
        ce = variance_complete(x, "CE")
        assert n * cre.std_error**2 == pytest.approx(1 / 12, rel=0.05)
        assert n * ce.std_error**2 == pytest.approx(7 / 12, rel=0.05)

    def test_std_error_shrinks_like_root_n(self, rng):
        ratios = []
        for _ in range(100):
            x = rng.exponential(size=200)
            ratios.append(variance_complete(x, "CRE").std_error / variance_complete(x[:100], "CRE").std_error)
        assert 0.6 <= np.mean(ratios) <= 0.82


def _censored(rng, n, rate=0.25):
    x = rng.exponential(size=n)
    c = rng.exponential(1 / rate, size=n)
    return CensoredSample(np.minimum(x, c), (x <= c).astype(int))


class TestBootstrap:
    def test_deterministic(self, rng):
        cs = _censored(rng, 60)
        a = bootstrap_censored(cs, "CRE", n_boot=200, seed=5)
        b = bootstrap_censored(cs, "CRE", n_boot=200, seed=5)
        assert a == b
        assert a.method is InferenceMethod.BOOTSTRAP
        assert a.ci_lower <= a.ci_upper
        assert bootstrap_censored(cs, "CRE", n_boot=200, seed=6) != a

    def test_uncensored_matches_projection(self, rng):
        x = rng.exponential(size=100)
        boot = bootstrap_censored(CensoredSample.uncensored(x), "CRE", n_boot=1000, seed=1)
        proj = variance_complete(x, "CRE")
        assert boot.std_error == pytest.approx(proj.std_error, rel=0.15)
        assert boot.estimate == pytest.approx(proj.estimate, rel=1e-12)

    def test_ce_measure(self, rng):
        r = bootstrap_censored(_censored(rng, 80), "CE", n_boot=200, seed=3)
        assert r.measure is Measure.CE and r.estimate > 0

    def test_unstable(self):
        # two events in ten rows: about 38% of resamples have fewer than two
        cs = CensoredSample(np.arange(1.0, 11.0), [1, 1, 0, 0, 0, 0, 0, 0, 0, 0])
        with pytest.raises(UnstableBootstrapError) as info:
            bootstrap_censored(cs, "CRE", n_boot=200, seed=0)
        assert info.value.skipped > 40

    def test_argument_checks(self, rng):
        cs = _censored(rng, 30)
        with pytest.raises(ValueError):
            bootstrap_censored(cs, "CRE", n_boot=50)
        with pytest.raises(ValueError):
            bootstrap_censored(cs, "CRE", level=1.5)
        with pytest.raises(ValueError):
            bootstrap_censored(cs, "CRE_PLUGIN")
