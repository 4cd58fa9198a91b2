import math

import numpy as np
import pytest

from gbarmin import (
    GbarParams,
    GeneratorConfig,
    avg_min_entropy,
    build_oracle,
    generate_array,
    make_alpha,
    nist_predict,
    nist_predict_all,
)
from gbarmin import _backend
from gbarmin.nist import (
    PREDICTOR_NAMES,
    global_prediction_bound,
    local_prediction_probability,
)

from reference import (
    ref_lag,
    ref_lz78y,
    ref_multimcw,
    ref_multimmc,
    ref_no_run_probability,
)


def _gen(params, bits, seed):
    return generate_array(GeneratorConfig(params=params, num_bits=bits,
                                          seed=seed, burn_in_bits=10_000))


class TestEstimateMath:
    def test_global_bound_formula(self):
        n, c = 10_000, 6_000
        p = c / n
        expected = p + 2.576 * math.sqrt(p * (1 - p) / (n - 1))
        assert global_prediction_bound(c, n) == pytest.approx(expected,
                                                              rel=1e-12)

    def test_global_bound_zero_correct(self):
        n = 1_000
        assert global_prediction_bound(0, n) == pytest.approx(
            1 - 0.01 ** (1 / n), rel=1e-12)

    def test_global_bound_capped_at_one(self):
        assert global_prediction_bound(1_000, 1_000) == 1.0

    @pytest.mark.parametrize("longest,n", [(3, 500), (10, 5_000),
                                           (25, 100_000), (0, 200)])
    def test_local_probability_inverts_run_dp(self, longest, n):
        # independent check: exact no-run DP evaluated at the solver output
        # must give back the 0.99 confidence level
        p = local_prediction_probability(longest, n)
        alpha = ref_no_run_probability(p, longest + 1, n)
        assert alpha == pytest.approx(0.99, abs=1e-4)

    def test_local_probability_all_correct(self):
        assert local_prediction_probability(100, 100) == 1.0


class TestStreams:
    def test_constant_stream_zero_entropy(self):
        ones = np.ones(100_000, dtype=np.uint8)
        for name in PREDICTOR_NAMES:
            est = nist_predict(ones, name)
            assert est.p_acc == 1.0
            assert est.h_final == 0.0
            assert est.h_global == 0.0 and est.h_local == 0.0

    def test_alternating_stream_learned_by_lag_predictors(self):
        alt = np.tile(np.array([0, 1], dtype=np.uint8), 50_000)
        for name in ("lag", "multimmc", "lz78y"):
            est = nist_predict(alt, name)
            assert est.p_acc > 0.999
            assert est.h_final == pytest.approx(0.0, abs=1e-9)

    def test_noise_only_near_full_entropy(self):
        params = GbarParams(alpha=(0.0,), beta=1.0)
        bits = _gen(params, 1_000_000, seed=5)
        for name, est in nist_predict_all(bits).items():
            assert abs(est.h_final - 1.0) < 0.05, name
            # the local estimate is floored at one bit per bit
            assert est.h_local <= 1.0 and est.h_global <= 1.0

    def test_min_rule_and_bounds(self):
        params = GbarParams.from_alpha(make_alpha("uniform", 4, 0.5))
        bits = _gen(params, 300_000, seed=6)
        for est in nist_predict_all(bits).values():
            assert est.h_final == min(est.h_global, est.h_local)
            assert 0.0 <= est.h_final <= 1.0
            assert est.strategy == "next_bit"
            assert est.target_bits == 1

    def test_correlated_ordering_multimmc_tracks_average(self):
        # the order-matching Markov predictor lands on the average
        # min-entropy of one bit; window-majority and lag predictors sit above
        params = GbarParams.from_alpha(make_alpha("uniform", 10, 0.5))
        oracle = build_oracle(params)
        target = avg_min_entropy(oracle, 0)[0]
        bits = _gen(params, 1_000_000, seed=42)
        ests = nist_predict_all(bits)
        assert abs(ests["multimmc"].h_global - target) < 0.05
        assert ests["multimcw"].h_global > target
        assert ests["lag"].h_global > target

    def test_too_short_stream_raises(self):
        with pytest.raises(ValueError):
            nist_predict(np.ones(50, dtype=np.uint8), "multimcw")
        with pytest.raises(ValueError):
            nist_predict(np.ones(10, dtype=np.uint8), "lz78y")
        with pytest.raises(ValueError):
            nist_predict(np.ones(100, dtype=np.uint8), "fortune_teller")


class TestAgainstNaiveReference:
    """Third implementation: tuple-keyed dicts straight from the procedure
    description, independent of the packed-integer kernels."""

    @pytest.fixture(scope="class")
    @staticmethod
    def stream():
        params = GbarParams.from_alpha(
            make_alpha("uniform", 5, 0.6, sign_pattern=[1, -1, 1, -1, 1]),
            epsilon=0.45)
        return _gen(params, 20_000, seed=99)

    def test_multimcw(self, stream):
        windows = np.asarray([63, 255, 1023, 4095], dtype=np.int64)
        got = _backend.kernel("nist_multimcw")(stream, windows)
        assert tuple(got) == ref_multimcw(stream)

    def test_lag(self, stream):
        got = _backend.kernel("nist_lag")(stream, 128)
        assert tuple(got) == ref_lag(stream)

    def test_multimmc(self, stream):
        got = _backend.kernel("nist_multimmc")(stream, 16, 100_000)
        assert tuple(got) == ref_multimmc(stream)

    def test_lz78y(self, stream):
        got = _backend.kernel("nist_lz78y")(stream, 16, 65_536)
        assert tuple(got) == ref_lz78y(stream)

    def test_lz78y_entry_cap_binds(self):
        # tiny cap: insertion order (deep contexts first) decides the keys
        rng = np.random.default_rng(3)
        bits = rng.integers(0, 2, 5_000).astype(np.uint8)
        got = _backend.kernel("nist_lz78y")(bits, 8, 50)
        assert tuple(got) == ref_lz78y(bits, depth=8, max_entries=50)

    def test_multimmc_entry_cap_binds(self):
        rng = np.random.default_rng(4)
        bits = rng.integers(0, 2, 5_000).astype(np.uint8)
        got = _backend.kernel("nist_multimmc")(bits, 8, 30)
        assert tuple(got) == ref_multimmc(bits, max_order=8, max_entries=30)


class TestBackendEquivalence:
    @pytest.mark.parametrize("kernel,args", [
        ("nist_multimcw", (np.asarray([63, 255, 1023, 4095], dtype=np.int64),)),
        ("nist_lag", (128,)),
        ("nist_multimmc", (16, 100_000)),
        ("nist_lz78y", (16, 65_536)),
    ])
    def test_kernels_agree(self, kernel, args):
        params = GbarParams.from_alpha(
            make_alpha("exponential", 6, 0.7, sign_pattern=[1, -1, 1, 1, -1, 1]))
        bits = _gen(params, 100_000, seed=13)
        results = {
            name: _backend.load_backend(name).__dict__[kernel](bits, *args)
            for name in ("numba", "numpy")
        }
        assert tuple(results["numba"]) == tuple(results["numpy"])

    def test_count_windows_agree(self):
        params = GbarParams.from_alpha(make_alpha("gaussian", 5, 0.6))
        bits = _gen(params, 200_000, seed=14)
        for width in (1, 7, 19):
            a = _backend.load_backend("numba").count_windows(bits, width)
            b = _backend.load_backend("numpy").count_windows(bits, width)
            np.testing.assert_array_equal(a, b)
