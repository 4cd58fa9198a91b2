"""Tabular multi-bit predictor with joint and greedy decoding.

The predictor counts, for every p_model-bit context in the training stream,
how often each of the 2^n possible n-bit continuations follows it.  Joint
decoding returns the argmax over all 2^n classes; greedy decoding rolls out
one bit at a time from an auxiliary next-bit table.  Both can also be
derived directly from an exact transition law, which is how theoretical
decoding comparisons are produced.

Accuracy converts to a per-bit min-entropy estimate as -log2(p_acc) / n,
with a Wald 95% confidence half-width propagated through the log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .bitseq import BitSequence
from .errors import DimensionLimitError
from .oracle import MAX_ENUMERATION_BITS, MarkovOracle, conditional_max_future

WALD_Z = 1.96  # 95% confidence


@dataclass(frozen=True)
class CountingPredictor:
    """Occurrence counts of (context, n-bit future) pairs from training data."""

    p_model: int
    target_bits: int
    counts: np.ndarray          # shape (2^p_model, 2^target_bits), int64
    next_bit_counts: np.ndarray  # shape (2^p_model, 2), int64

    @property
    def num_contexts(self) -> int:
        return 1 << self.p_model

    def context_seen(self, context: int) -> bool:
        return bool(self.counts[context].sum() > 0)

    def conditional_probabilities(self, smoothing: int = 0) -> np.ndarray:
        """Per-context future distribution estimates.

        Pure relative frequencies by default (rows of an unseen context are
        uniform); ``smoothing=1`` adds one pseudo-count per class.  Smoothing
        never changes a strict argmax, so decoding is unaffected; this is an
        export for consumers that need probabilities.
        """
        if smoothing < 0:
            raise ValueError("smoothing must be >= 0")
        num_classes = self.counts.shape[1]
        work = self.counts.astype(np.float64) + float(smoothing)
        totals = work.sum(axis=1, keepdims=True)
        zero = totals[:, 0] == 0
        work[zero] = 1.0
        totals[zero] = float(num_classes)
        return work / totals


@dataclass(frozen=True)
class PredictorEstimate:
    """Accuracy and entropy estimate of one predictor run."""

    name: str
    strategy: str               # joint | greedy | next_bit
    target_bits: int
    p_acc: float
    n_evals: int
    h_per_bit: float
    ci_delta: float
    h_global: float | None = None
    h_local: float | None = None
    h_final: float | None = None
    unseen_contexts: int = 0


def _as_bits(stream) -> np.ndarray:
    if isinstance(stream, BitSequence):
        return stream.to_array()
    arr = np.asarray(stream, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("bit stream must be one-dimensional")
    return arr


def _window_values(bits: np.ndarray, width: int) -> np.ndarray:
    """Stride-1 integer values of width-bit windows (later bit = lower bit)."""
    n_win = bits.shape[0] - width + 1
    values = np.zeros(n_win, dtype=np.int64)
    for j in range(width):
        values += bits[j:j + n_win].astype(np.int64) << (width - 1 - j)
    return values


def fit_counting(train, p_model: int, n: int) -> CountingPredictor:
    """Tally every (context, future) window of the training stream."""
    if p_model < 1 or n < 1:
        raise ValueError("p_model and n must be >= 1")
    if p_model + n > MAX_ENUMERATION_BITS:
        raise DimensionLimitError(
            f"count table width {p_model + n} exceeds the "
            f"{MAX_ENUMERATION_BITS}-bit cap"
        )
    bits = _as_bits(train)
    width = p_model + n
    if bits.shape[0] < width:
        raise ValueError(
            f"training stream of {bits.shape[0]} bits is shorter than one "
            f"window ({width} bits)"
        )
    counts = _backend.kernel("count_windows")(bits, width)
    counts = counts.reshape(1 << p_model, 1 << n)
    half = 1 << (n - 1)
    next_bit = np.stack(
        [counts[:, :half].sum(axis=1), counts[:, half:].sum(axis=1)], axis=1
    )
    return CountingPredictor(p_model=p_model, target_bits=n, counts=counts,
                             next_bit_counts=next_bit)


def joint_policy(pred: CountingPredictor) -> tuple[np.ndarray, np.ndarray]:
    """Per-context argmax future (ties to the lowest index) and seen mask."""
    table = np.argmax(pred.counts, axis=1).astype(np.int64)
    seen = pred.counts.sum(axis=1) > 0
    table[~seen] = 0  # unseen contexts fall back to future 0
    return table, seen


def greedy_policy(pred: CountingPredictor) -> tuple[np.ndarray, np.ndarray]:
    """Per-context greedy rollout future and seen mask.

    At each step the argmax next bit is appended and the window rolls
    forward.  Count ties resolve to bit 0 (the lowest index, matching the
    joint argmax, so single-bit targets decode identically under both
    strategies); unseen rolling contexts also contribute bit 0.
    """
    nb = pred.next_bit_counts
    p_model = pred.p_model
    mask = (1 << p_model) - 1
    contexts = np.arange(1 << p_model, dtype=np.int64)
    seen_ctx = nb.sum(axis=1) > 0

    cur = contexts.copy()
    futures = np.zeros(1 << p_model, dtype=np.int64)
    for _ in range(pred.target_bits):
        bit = (nb[cur, 1] > nb[cur, 0]).astype(np.int64)
        futures = (futures << 1) | bit
        cur = ((cur << 1) | bit) & mask
    return futures, seen_ctx


def predict_joint(pred: CountingPredictor, context: int) -> int:
    """Most frequent n-bit continuation of ``context`` in the training data."""
    table, _ = joint_policy(pred)
    return int(table[context])


def predict_greedy(pred: CountingPredictor, context: int) -> int:
    """Stepwise argmax rollout of n bits starting from ``context``."""
    table, _ = greedy_policy(pred)
    return int(table[context])


def exact_joint_policy(oracle: MarkovOracle, n: int) -> np.ndarray:
    """Joint argmax futures computed from exact probabilities."""
    _, futures = conditional_max_future(oracle, n - 1)
    return futures


def exact_greedy_policy(oracle: MarkovOracle, n: int) -> np.ndarray:
    """Greedy rollout futures computed from exact probabilities.

    Strict argmax per step; an exact probability tie (conditional exactly
    1/2) repeats the most recent window bit, the way a sequence learner
    with a recency bias resolves an uninformative step.  Unlike count ties
    in the trained predictor, probability ties here are structural, and
    this rule is what makes greedy decoding provably match joint decoding
    on positively-correlated models while mis-decoding alternating ones.
    """
    t1 = oracle.transition
    mask = oracle.num_contexts - 1
    cur = np.arange(oracle.num_contexts, dtype=np.int64)
    futures = np.zeros(oracle.num_contexts, dtype=np.int64)
    for _ in range(n):
        bit = np.where(t1[cur] > 0.5, 1,
                       np.where(t1[cur] < 0.5, 0, cur & 1)).astype(np.int64)
        futures = (futures << 1) | bit
        cur = ((cur << 1) | bit) & mask
    return futures


def wald_ci_delta(p_acc: float, n_evals: int, target_bits: int,
                  z: float = WALD_Z) -> float:
    """Half-width of the per-bit entropy CI from a Wald accuracy interval."""
    if p_acc <= 0.0 or n_evals <= 0:
        return math.nan
    return (z / (target_bits * math.log(2.0))) * math.sqrt(
        (1.0 / p_acc - 1.0) / n_evals
    )


def evaluate_policy(policy: np.ndarray, test, p_model: int, n: int,
                    stride: int | None = None, name: str = "policy",
                    strategy: str = "joint",
                    seen: np.ndarray | None = None) -> PredictorEstimate:
    """Accuracy of a fixed per-context policy over test windows.

    ``stride`` defaults to the window width (disjoint windows), which keeps
    the Wald interval honest; pass 1 for maximally overlapped evaluation.
    """
    bits = _as_bits(test)
    width = p_model + n
    if stride is None:
        stride = width
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if bits.shape[0] < width:
        raise ValueError("test stream shorter than one window")
    values = _window_values(bits, width)[::stride]
    ctx = values >> n
    fut = values & ((1 << n) - 1)
    n_evals = int(values.shape[0])
    n_correct = int((policy[ctx] == fut).sum())
    unseen = int((~seen[ctx]).sum()) if seen is not None else 0

    p_acc = n_correct / n_evals
    h = math.inf if p_acc == 0.0 else -math.log2(p_acc) / n
    return PredictorEstimate(
        name=name,
        strategy=strategy,
        target_bits=n,
        p_acc=p_acc,
        n_evals=n_evals,
        h_per_bit=h,
        ci_delta=wald_ci_delta(p_acc, n_evals, n),
        unseen_contexts=unseen,
    )


def evaluate(pred: CountingPredictor, test, strategy: str = "joint",
             stride: int | None = None,
             name: str = "counting") -> PredictorEstimate:
    """Evaluate a trained predictor on held-out data.

    The caller is responsible for keeping train and test streams disjoint
    (distinct seeds or byte ranges).
    """
    if strategy == "joint":
        policy, seen = joint_policy(pred)
    elif strategy == "greedy":
        policy, seen = greedy_policy(pred)
    else:
        raise ValueError(f"strategy must be 'joint' or 'greedy', got {strategy!r}")
    return evaluate_policy(policy, test, pred.p_model, pred.target_bits,
                           stride=stride, name=name, strategy=strategy,
                           seen=seen)


def theoretical_guess_probability(oracle: MarkovOracle, n: int) -> float:
    """Best achievable n-bit joint accuracy: 2^(-avg min-entropy total)."""
    values, _ = conditional_max_future(oracle, n - 1)
    return float(oracle.stationary @ values)
