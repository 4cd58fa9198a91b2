import math

import numpy as np
import pytest

from gbarmin import (
    GbarParams,
    GeneratorConfig,
    avg_min_entropy,
    build_oracle,
    conditional_max_future,
    evaluate,
    exact_greedy_policy,
    exact_joint_policy,
    fit_counting,
    generate_array,
    greedy_policy,
    joint_policy,
    make_alpha,
    predict_joint,
    theoretical_guess_probability,
)
from gbarmin.predictors import CountingPredictor, wald_ci_delta

NOISE_ONLY = GbarParams(alpha=(0.0,), beta=1.0, epsilon=0.5)
# two-lag model with distinct lag weights: no conditional sits at 1/2,
# so argmax decisions are noise-robust
PLAIN_2LAG = GbarParams(alpha=(0.4, -0.2), beta=0.4)


def _gen(params, bits, seed, burn=20_000):
    return generate_array(GeneratorConfig(params=params, num_bits=bits,
                                          seed=seed, burn_in_bits=burn))


class TestFit:
    def test_all_zeros_stream(self):
        pred = fit_counting(np.zeros(100, dtype=np.uint8), p_model=2, n=2)
        assert pred.counts[0, 0] == 97  # every window is context 0 -> future 0
        assert pred.counts.sum() == 97
        assert pred.next_bit_counts[0, 0] == 97

    def test_row_sums_match_context_occurrences(self):
        bits = _gen(PLAIN_2LAG, 50_000, seed=1)
        pred = fit_counting(bits, p_model=2, n=3)
        from gbarmin import _backend
        ctx_counts = _backend.kernel("count_windows")(bits, 5).reshape(4, 8)
        np.testing.assert_array_equal(pred.counts.sum(axis=1),
                                      ctx_counts.sum(axis=1))
        np.testing.assert_array_equal(pred.next_bit_counts.sum(axis=1),
                                      pred.counts.sum(axis=1))

    def test_noise_only_cells_near_uniform(self):
        bits = _gen(NOISE_ONLY, 400_000, seed=2, burn=100)
        pred = fit_counting(bits, p_model=2, n=2)
        total = pred.counts.sum()
        expect = total / 16
        sigma = math.sqrt(total * (1 / 16) * (15 / 16))
        assert np.all(np.abs(pred.counts - expect) < 4 * sigma)

    def test_trained_argmax_matches_exact(self):
        oracle = build_oracle(PLAIN_2LAG)
        bits = _gen(PLAIN_2LAG, 1_000_000, seed=3)
        pred = fit_counting(bits, p_model=2, n=4)
        table, _ = joint_policy(pred)
        np.testing.assert_array_equal(table, exact_joint_policy(oracle, 4))

    def test_conditional_probabilities_export(self):
        counts = np.array([[3, 1, 0, 0], [0, 0, 0, 0]], dtype=np.int64)
        pred = _predictor_from_counts(counts, 2)
        raw = pred.conditional_probabilities()
        np.testing.assert_allclose(raw[0], [0.75, 0.25, 0, 0])
        np.testing.assert_allclose(raw[1], [0.25] * 4)  # unseen -> uniform
        smoothed = pred.conditional_probabilities(smoothing=1)
        np.testing.assert_allclose(smoothed[0], [0.5, 0.25, 0.125, 0.125])
        np.testing.assert_allclose(smoothed[1], [0.25] * 4)
        # smoothing cannot flip a strict argmax
        assert np.argmax(smoothed[0]) == np.argmax(raw[0])

    def test_rejects_short_or_invalid(self):
        from gbarmin import DimensionLimitError

        with pytest.raises(ValueError):
            fit_counting(np.zeros(3, dtype=np.uint8), p_model=2, n=2)
        with pytest.raises(ValueError):
            fit_counting(np.zeros(10, dtype=np.uint8), p_model=0, n=2)
        with pytest.raises(ValueError):
            fit_counting(np.zeros(10, dtype=np.uint8), p_model=2, n=0)
        with pytest.raises(DimensionLimitError):
            fit_counting(np.zeros(100, dtype=np.uint8), p_model=20, n=8)


def _predictor_from_counts(counts, n):
    counts = np.asarray(counts, dtype=np.int64)
    p_model = counts.shape[0].bit_length() - 1
    half = counts.shape[1] // 2
    next_bit = np.stack([counts[:, :half].sum(axis=1),
                         counts[:, half:].sum(axis=1)], axis=1)
    return CountingPredictor(p_model=p_model, target_bits=n, counts=counts,
                             next_bit_counts=next_bit)


class TestDecoding:
    def test_single_observation_is_returned(self):
        counts = np.zeros((4, 4), dtype=np.int64)
        counts[2, 3] = 1
        pred = _predictor_from_counts(counts, 2)
        assert predict_joint(pred, 2) == 3

    def test_joint_tie_breaks_to_lowest_index(self):
        counts = np.zeros((2, 4), dtype=np.int64)
        counts[0, 1] = 5
        counts[0, 3] = 5
        pred = _predictor_from_counts(counts, 2)
        assert predict_joint(pred, 0) == 1

    def test_unseen_context_returns_zero_and_flags(self):
        counts = np.zeros((4, 4), dtype=np.int64)
        counts[1, 2] = 7
        pred = _predictor_from_counts(counts, 2)
        table, seen = joint_policy(pred)
        assert predict_joint(pred, 3) == 0
        assert not seen[3] and seen[1]

    def test_single_bit_targets_decode_identically(self):
        # includes exact count ties: both strategies resolve to bit 0
        rng = np.random.default_rng(11)
        counts = rng.integers(0, 5, size=(8, 2)).astype(np.int64)
        counts[3] = (4, 4)
        counts[5] = (0, 0)
        pred = _predictor_from_counts(counts, 1)
        jt, _ = joint_policy(pred)
        gt, _ = greedy_policy(pred)
        np.testing.assert_array_equal(jt, gt)

    def test_trained_strategies_on_generated_data(self):
        bits = _gen(PLAIN_2LAG, 500_000, seed=5)
        pred = fit_counting(bits, p_model=2, n=1)
        jt, _ = joint_policy(pred)
        gt, _ = greedy_policy(pred)
        np.testing.assert_array_equal(jt, gt)


class TestExactPolicies:
    def test_positive_pair_constant_contexts_continue(self):
        # all-equal continuations dominate for positively correlated lags
        params = GbarParams.from_alpha(make_alpha("uniform", 2, 0.5, [1, 1]))
        oracle = build_oracle(params)
        for n in (2, 4, 8):
            table = exact_joint_policy(oracle, n)
            assert table[0b00] == 0
            assert table[0b11] == (1 << n) - 1

    def test_positive_pair_greedy_equals_joint(self):
        params = GbarParams.from_alpha(make_alpha("uniform", 2, 0.5, [1, 1]))
        oracle = build_oracle(params)
        for n in (2, 4, 8):
            np.testing.assert_array_equal(exact_joint_policy(oracle, n),
                                          exact_greedy_policy(oracle, n))

    def test_alternating_pair_greedy_diverges(self):
        params = GbarParams.from_alpha(make_alpha("uniform", 2, 0.5, [1, -1]))
        oracle = build_oracle(params)
        for n in (2, 4, 8):
            joint = exact_joint_policy(oracle, n)
            greedy = exact_greedy_policy(oracle, n)
            assert np.any(joint != greedy)

    def test_alternating_pair_greedy_strictly_less_probable(self):
        params = GbarParams.from_alpha(make_alpha("uniform", 2, 0.5, [1, -1]))
        oracle = build_oracle(params)
        n = 4
        values, _ = conditional_max_future(oracle, n - 1)
        greedy = exact_greedy_policy(oracle, n)

        def path_prob(ctx, fut):
            prob, c = 1.0, ctx
            for k in range(n):
                b = (fut >> (n - 1 - k)) & 1
                prob *= oracle.transition[c] if b else 1 - oracle.transition[c]
                c = ((c << 1) | b) & 3
            return prob

        greedy_probs = np.array([path_prob(c, greedy[c]) for c in range(4)])
        assert np.all(greedy_probs <= values + 1e-15)
        assert np.any(greedy_probs < values - 1e-6)


class TestEvaluate:
    def test_perfect_predictor(self):
        ones = np.ones(5_000, dtype=np.uint8)
        pred = fit_counting(ones, p_model=2, n=2)
        est = evaluate(pred, ones)
        assert est.p_acc == 1.0
        assert est.h_per_bit == 0.0

    def test_noise_only_four_bits(self):
        train = _gen(NOISE_ONLY, 300_000, seed=6, burn=100)
        test = _gen(NOISE_ONLY, 600_000, seed=7, burn=100)
        pred = fit_counting(train, p_model=2, n=4)
        est = evaluate(pred, test)
        sigma = math.sqrt((1 / 16) * (15 / 16) / est.n_evals)
        assert abs(est.p_acc - 1 / 16) < 4 * sigma
        assert abs(est.h_per_bit - 1.0) < 0.02

    def test_zero_accuracy_reports_infinity(self):
        counts = np.zeros((2, 2), dtype=np.int64)
        counts[:, 1] = 5  # always predict 1
        pred = _predictor_from_counts(counts, 1)
        est = evaluate(pred, np.zeros(1_000, dtype=np.uint8))
        assert est.p_acc == 0.0
        assert math.isinf(est.h_per_bit)
        assert math.isnan(est.ci_delta)

    def test_unseen_contexts_flagged(self):
        counts = np.zeros((4, 2), dtype=np.int64)
        counts[0] = (3, 1)
        pred = _predictor_from_counts(counts, 1)
        test = np.tile(np.array([1, 1, 0], dtype=np.uint8), 100)
        est = evaluate(pred, test, stride=1)
        assert est.unseen_contexts > 0

    def test_ci_formula(self):
        # hand evaluation of the propagated Wald half-width
        delta = wald_ci_delta(0.25, 10_000, 4)
        expected = (1.96 / (4 * math.log(2))) * math.sqrt((4 - 1) / 10_000)
        assert delta == pytest.approx(expected, rel=1e-12)

    def test_stride_defaults_to_disjoint_windows(self):
        train = _gen(PLAIN_2LAG, 100_000, seed=8)
        pred = fit_counting(train, p_model=2, n=2)
        est = evaluate(pred, _gen(PLAIN_2LAG, 40_000, seed=9))
        assert est.n_evals == (40_000 - 4) // 4 + 1

    def test_joint_dominates_greedy(self):
        oracle = build_oracle(PLAIN_2LAG)
        train = _gen(PLAIN_2LAG, 400_000, seed=10)
        test = _gen(PLAIN_2LAG, 400_000, seed=11)
        for n in (2, 3, 5):
            pred = fit_counting(train, p_model=2, n=n)
            est_j = evaluate(pred, test, strategy="joint")
            est_g = evaluate(pred, test, strategy="greedy")
            assert est_j.p_acc >= est_g.p_acc

    def test_rejects_unknown_strategy(self):
        pred = fit_counting(np.zeros(100, dtype=np.uint8), p_model=2, n=2)
        with pytest.raises(ValueError):
            evaluate(pred, np.zeros(100, dtype=np.uint8), strategy="beam")


class TestConsistency:
    def test_accuracy_approaches_theoretical_guess_probability(self):
        params = GbarParams.from_alpha(make_alpha("uniform", 10, 0.5))
        oracle = build_oracle(params)
        theory = theoretical_guess_probability(oracle, 8)
        test = _gen(params, 2_000_000, seed=21)
        gaps = []
        for train_bits, seed in ((100_000, 22), (10_000_000, 23)):
            train = _gen(params, train_bits, seed=seed)
            pred = fit_counting(train, p_model=10, n=8)
            est = evaluate(pred, test)
            gaps.append(abs(est.p_acc - theory))
        assert gaps[1] < gaps[0]
        assert gaps[1] < 0.01

    def test_ci_covers_exact_avg_min_entropy(self):
        # resampled evaluations of one configuration: the exact value must
        # land inside the 95% interval in at least 90 of 100 runs
        params = PLAIN_2LAG
        oracle = build_oracle(params)
        n = 2
        exact = avg_min_entropy(oracle, n - 1)[0]
        hits = 0
        for trial in range(100):
            train = _gen(params, 300_000, seed=3_000 + 2 * trial)
            test = _gen(params, 200_000, seed=3_001 + 2 * trial)
            pred = fit_counting(train, p_model=2, n=n)
            est = evaluate(pred, test)
            hits += abs(est.h_per_bit - exact) <= est.ci_delta
        assert hits >= 90
