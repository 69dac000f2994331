import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from extropy import (
    CensoredSample,
    InsufficientDataError,
    IpcwDegenerateError,
    Measure,
    estimate_ce,
    estimate_ce_censored,
    estimate_cre,
    estimate_cre_censored,
    ipcw_weights,
)
from extropy.errors import InsufficientEventsError

HAND = CensoredSample.from_pairs([(1, 1), (2, 0), (3, 1)])


def brute_force(cs, kernel):
    """Eq.-style double sum over j < i with weights from ipcw_weights."""
    w = ipcw_weights(cs).weights
    n = cs.n
    total = 0.0
    for i in range(n):
        for j in range(i):
            total += kernel(cs.times[i], cs.times[j]) * w[i] * w[j]
    return total / (n * (n - 1))


class TestWeights:
    def test_hand_example(self):
        assert_allclose(ipcw_weights(HAND).weights, [1.0, 0.0, 2.0])

    def test_all_events(self):
        w = ipcw_weights(CensoredSample.uncensored([3.0, 1.0, 2.0]))
        assert_allclose(w.weights, 1.0)
        assert not w.any_degenerate

    def test_early_censoring(self):
        w = ipcw_weights(CensoredSample.from_pairs([(1, 0), (2, 1)]))
        assert w.weights[1] == 2.0

    def test_known_k_degenerate_is_error(self):
        cs = CensoredSample.from_pairs([(1, 1), (2, 1), (5, 1)])
        k = lambda t: np.where(t < 4, 1.0, 0.0)  # noqa: E731
        with pytest.raises(IpcwDegenerateError) as info:
            ipcw_weights(cs, k)
        assert info.value.time == 5.0
        loose = ipcw_weights(cs, k, strict=False)
        assert loose.degenerate_flags.tolist() == [False, False, True]

    @given(st.lists(st.tuples(st.floats(0.01, 50), st.integers(0, 1)), min_size=1, max_size=30))
    def test_weight_invariants(self, pairs):
        cs = CensoredSample.from_pairs(pairs)
        w = ipcw_weights(cs).weights
        assert np.all((w == 0) == (cs.status == 0))
        assert np.all(w[cs.status == 1] >= 1.0)


class TestEstimators:
    def test_hand_values(self):
        assert estimate_cre_censored(HAND).value == pytest.approx(-1 / 3, rel=1e-15)
        assert estimate_ce_censored(HAND).value == pytest.approx(1.0, rel=1e-15)

    def test_metadata(self):
        r = estimate_cre_censored(HAND)
        assert r.measure is Measure.CRE
        assert (r.n_used, r.n_events, r.method) == (3, 2, "ipcw-u-statistic")

    def test_insufficient_events(self):
        with pytest.raises(InsufficientEventsError) as info:
            estimate_cre_censored(CensoredSample.from_pairs([(1, 1), (2, 0), (3, 0)]))
        assert info.value.count == 1
        assert isinstance(info.value, InsufficientDataError)

    @given(st.lists(st.tuples(st.floats(0.01, 50), st.integers(0, 1)), min_size=2, max_size=40))
    def test_fast_sum_matches_double_sum(self, pairs):
        cs = CensoredSample.from_pairs(pairs)
        if cs.n_events < 2:
            return
        assert estimate_cre_censored(cs).value == pytest.approx(-brute_force(cs, min), rel=1e-12)
        assert estimate_ce_censored(cs).value == pytest.approx(brute_force(cs, max), rel=1e-12)

    @given(st.lists(st.floats(0.01, 1e3), min_size=2, max_size=200))
    def test_no_censoring_reduces_to_complete(self, values):
        cs = CensoredSample.uncensored(values)
        assert estimate_cre_censored(cs).value == pytest.approx(estimate_cre(values).value, rel=1e-12)
        assert estimate_ce_censored(cs).value == pytest.approx(estimate_ce(values).value, rel=1e-12)

    def test_dropping_censored_row_is_deterministic(self, rng):
        x = rng.exponential(size=30)
        c = rng.exponential(4.0, size=30)
        cs = CensoredSample(np.minimum(x, c), (x <= c).astype(int))
        drop = int(np.flatnonzero(cs.status == 0)[0])
        keep = np.arange(cs.n) != drop
        reduced = CensoredSample(cs.times[keep], cs.status[keep])
        a = estimate_cre_censored(reduced).value
        b = estimate_cre_censored(CensoredSample(cs.times[keep].copy(), cs.status[keep].copy())).value
        assert a == b
        # and it is a genuinely different estimate: n and K-hat both change
        assert a != estimate_cre_censored(cs).value


@pytest.mark.slow
@pytest.mark.parametrize(
    "estimator, truth", [(estimate_cre_censored, -0.25), (estimate_ce_censored, 0.75)]
)
def test_known_k_unbiased(estimator, truth):
    # exp(1) lifetimes with exp(0.25) censoring: 20% censored
    rate, n, reps = 0.25, 200, 5000
    k = lambda t: np.exp(-rate * t)  # noqa: E731
    values = np.empty(reps)
    for r in range(reps):
        g = np.random.default_rng([99, r])
        x = g.exponential(size=n)
        c = g.exponential(1 / rate, size=n)
        values[r] = estimator(CensoredSample(np.minimum(x, c), (x <= c).astype(int)), k).value
    se = values.std(ddof=1) / np.sqrt(reps)
    assert abs(values.mean() - truth) < 3 * se
