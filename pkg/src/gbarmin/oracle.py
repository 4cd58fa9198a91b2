"""Exact min-entropy family computations for order-p binary Markov chains.

A chain is held as a :class:`MarkovOracle`: the full table of one-step
conditionals P(X_t = 1 | context) over all 2^p contexts plus the stationary
context distribution.  Three quantities are computed for a future window of
n+1 bits, all reported per bit (divide by n+1, logs base 2):

* plain min-entropy: -log2 max_f P(f), with P(f) obtained by dynamic
  programming over (context, emitted prefix);
* average min-entropy: -log2 of the stationary-weighted mean of the
  per-context maximum conditional future probability (max-product DP);
* worst-case min-entropy: -log2 of that maximum over contexts as well.

Futures are indexed with the most recent bit in the lowest position (see
``bitseq``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionLimitError, StationaryConvergenceError
from .generator import transition_table
from .params import GbarParams

MAX_ORACLE_ORDER = 20          # 2^p stationary solve cap
MAX_ENUMERATION_BITS = 27      # p + n + 1 cap: 2^27 doubles ~ 1 GiB
STATIONARY_TOL = 1e-12
STATIONARY_MAX_ITERATIONS = 10**6
_FIXED_POINT_TOL = 1e-10
_PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MarkovOracle:
    """Validated transition table + stationary context distribution."""

    p: int
    transition: np.ndarray   # P(X_t = 1 | context), shape (2^p,)
    stationary: np.ndarray   # pi over contexts, shape (2^p,)

    def __post_init__(self):
        transition = np.asarray(self.transition, dtype=np.float64)
        stationary = np.asarray(self.stationary, dtype=np.float64)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "stationary", stationary)
        size = 1 << self.p
        if transition.shape != (size,):
            raise ValueError(f"transition table must have shape ({size},)")
        if stationary.shape != (size,):
            raise ValueError(f"stationary distribution must have shape ({size},)")
        if np.any(transition < 0.0) or np.any(transition > 1.0):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.any(stationary < 0.0):
            raise ValueError("stationary probabilities must be non-negative")
        if abs(float(stationary.sum()) - 1.0) > _PROB_SUM_TOL:
            raise ValueError("stationary distribution must sum to 1")
        residual = np.max(np.abs(_advance(stationary, transition) - stationary))
        if residual > _FIXED_POINT_TOL:
            raise ValueError(
                f"stationary distribution is not a fixed point (residual {residual:.3e})"
            )

    @property
    def num_contexts(self) -> int:
        return 1 << self.p


class LimitEstimate(NamedTuple):
    """Process min-entropy per bit; ``exact`` is False for the tail fallback."""

    value: float
    exact: bool
    method: str


@dataclass(frozen=True)
class EntropyReport:
    """All per-bit entropy quantities for one (p, n) pair.

    ``h_avg`` and ``h_avg_total`` are both carried because consumers need
    the per-bit and the unnormalized average min-entropy independently.
    """

    p: int
    n: int
    h_min: float
    h_avg: float
    h_worst: float
    h_avg_total: float
    h_limit: float | None = None
    limit_exact: bool | None = None
    method: str = "exact"
    num_samples: int | None = None
    sample_bits: int | None = None
    warnings: tuple[str, ...] = ()


def _advance(pi: np.ndarray, transition: np.ndarray) -> np.ndarray:
    """One step of the context chain: (pi T)[c']."""
    size = transition.size
    mask = size - 1
    contexts = np.arange(size, dtype=np.int64)
    idx0 = (contexts << 1) & mask
    idx1 = idx0 | 1
    return (
        np.bincount(idx0, weights=pi * (1.0 - transition), minlength=size)
        + np.bincount(idx1, weights=pi * transition, minlength=size)
    )


def stationary_distribution(
    transition: np.ndarray,
    init: np.ndarray | None = None,
    tol: float = STATIONARY_TOL,
    max_iterations: int = STATIONARY_MAX_ITERATIONS,
) -> np.ndarray:
    """Power-iterate the 2^p-context chain to its stationary distribution.

    Raises :class:`StationaryConvergenceError` when the iteration does not
    settle (reducible or periodic chains with an unlucky start).
    """
    transition = np.asarray(transition, dtype=np.float64)
    size = transition.size
    if init is None:
        pi = np.full(size, 1.0 / size)
    else:
        pi = np.asarray(init, dtype=np.float64)
        if pi.shape != (size,) or np.any(pi < 0):
            raise ValueError("init must be a non-negative vector over contexts")
        pi = pi / pi.sum()
    for _ in range(max_iterations):
        nxt = _advance(pi, transition)
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt / nxt.sum()
        pi = nxt
    raise StationaryConvergenceError(
        f"power iteration did not converge within {max_iterations} iterations"
    )


def build_oracle(params: GbarParams) -> MarkovOracle:
    """Exact oracle for a gbAR(p) parameter set."""
    if params.p > MAX_ORACLE_ORDER:
        raise DimensionLimitError(
            f"p={params.p} exceeds the stationary-solve cap of {MAX_ORACLE_ORDER}"
        )
    table = transition_table(params)
    pi = stationary_distribution(table)
    oracle = MarkovOracle(p=params.p, transition=table, stationary=pi)
    if params.has_uniform_noise():
        # unbiased noise forces unbiased bit marginals; verify rather than assume
        contexts = np.arange(oracle.num_contexts, dtype=np.int64)
        for j in range(params.p):
            marginal = float(pi @ ((contexts >> j) & 1))
            if abs(marginal - 0.5) > 1e-9:
                raise StationaryConvergenceError(
                    f"stationary bit marginal {marginal} != 1/2 under uniform noise"
                )
    return oracle


def oracle_from_table(
    transition,
    init: np.ndarray | None = None,
    tol: float = STATIONARY_TOL,
    max_iterations: int = STATIONARY_MAX_ITERATIONS,
) -> MarkovOracle:
    """Oracle for an arbitrary order-p transition table (length must be 2^p)."""
    transition = np.asarray(transition, dtype=np.float64)
    p = int(transition.size).bit_length() - 1
    if (1 << p) != transition.size:
        raise ValueError("transition table length must be a power of two")
    if p > MAX_ORACLE_ORDER:
        raise DimensionLimitError(
            f"p={p} exceeds the stationary-solve cap of {MAX_ORACLE_ORDER}"
        )
    pi = stationary_distribution(transition, init=init, tol=tol,
                                 max_iterations=max_iterations)
    return MarkovOracle(p=p, transition=transition, stationary=pi)


def _check_window(p: int, n: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if p + n + 1 > MAX_ENUMERATION_BITS:
        raise DimensionLimitError(
            f"p + n + 1 = {p + n + 1} exceeds the exact-enumeration cap of "
            f"{MAX_ENUMERATION_BITS}; use the Monte Carlo estimator instead"
        )


def joint_future_distribution(
    oracle: MarkovOracle, n: int, context: int | None = None
) -> np.ndarray:
    """P(x_t, ..., x_{t+n}) over all 2^(n+1) futures.

    With ``context`` given, conditions on that starting context instead of
    averaging over the stationary distribution.  Future index bit 0 holds
    x_{t+n} (most recent lowest).
    """
    _check_window(oracle.p, n)
    p = oracle.p
    size = oracle.num_contexts
    mask = size - 1
    t1 = oracle.transition
    t0 = 1.0 - t1

    if context is None:
        start = oracle.stationary
    else:
        if not 0 <= context < size:
            raise ValueError(f"context {context} out of range for p={p}")
        start = np.zeros(size)
        start[context] = 1.0

    # phase 1: dense table over (current context, emitted prefix)
    W = start[:, None].copy()
    k = 0
    half = size >> 1
    while k < min(p, n + 1):
        F = 1 << k
        Wn = np.zeros((size, 2 * F))
        for x in (0, 1):
            px = t1 if x else t0
            S = (W * px[:, None]).reshape(2, half, F).sum(axis=0)
            Wn[x::2, x::2] = S
        W = Wn
        k += 1

    J = W.sum(axis=0)
    if k == n + 1:
        return J

    # phase 2: context is now the low p bits of the emitted prefix
    while k < n + 1:
        prefix_ctx = np.arange(1 << k, dtype=np.int64) & mask
        Jn = np.empty(1 << (k + 1))
        Jn[0::2] = J * t0[prefix_ctx]
        Jn[1::2] = J * t1[prefix_ctx]
        J = Jn
        k += 1
    return J


def conditional_max_future(oracle: MarkovOracle, n: int):
    """Per-context max conditional future probability and its argmax.

    Returns ``(values, futures)``: for each context c, the probability of
    the most likely (n+1)-bit future given c and that future's index.  Ties
    resolve to the lowest future index.  Only 2^p tables are held, so this
    runs beyond the joint-enumeration cap (futures stay within int64).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n + 1 > 62:
        raise DimensionLimitError("future index would overflow 62 bits")
    size = oracle.num_contexts
    mask = size - 1
    contexts = np.arange(size, dtype=np.int64)
    next0 = (contexts << 1) & mask
    next1 = next0 | 1
    t1 = oracle.transition
    t0 = 1.0 - t1

    values = np.ones(size)
    futures = np.zeros(size, dtype=np.int64)
    for k in range(n + 1):
        v0 = t0 * values[next0]
        v1 = t1 * values[next1]
        take1 = v1 > v0
        values = np.where(take1, v1, v0)
        futures = np.where(take1, (np.int64(1) << k) | futures[next1],
                           futures[next0])
    return values, futures


def min_entropy(oracle: MarkovOracle, n: int) -> float:
    """Per-bit min-entropy of the next n+1 bits."""
    joint = joint_future_distribution(oracle, n)
    return -math.log2(float(joint.max())) / (n + 1)


def avg_min_entropy(oracle: MarkovOracle, n: int) -> tuple[float, float]:
    """Per-bit and total average min-entropy of the next n+1 bits."""
    _check_window(oracle.p, n)
    values, _ = conditional_max_future(oracle, n)
    total = -math.log2(float(oracle.stationary @ values))
    return total / (n + 1), total


def worst_case_min_entropy(oracle: MarkovOracle, n: int) -> float:
    """Per-bit worst-case min-entropy (max over context and future)."""
    _check_window(oracle.p, n)
    values, _ = conditional_max_future(oracle, n)
    return -math.log2(float(values.max())) / (n + 1)


def is_simtp(oracle: MarkovOracle, tol: float = 1e-9) -> bool:
    """True when max_x P(x | context) is the same for every context."""
    peak = np.maximum(oracle.transition, 1.0 - oracle.transition)
    return float(peak.max() - peak.min()) <= tol


def is_bitflip_symmetric(oracle: MarkovOracle, tol: float = 1e-9) -> bool:
    """True when P(x | c) == P(1^x | bitflipped c) for every context.

    For an order-p Markov chain the one-step property implies the n-step
    one, so only the transition table is inspected.
    """
    t1 = oracle.transition
    return float(np.max(np.abs(t1 + t1[::-1] - 1.0))) <= tol


def min_entropy_limit(params: GbarParams, tol: float = 1e-9) -> LimitEstimate:
    """Process min-entropy per bit (the n -> infinity limit).

    Exact for uniform-noise positive models (closed form -log2(1 - beta/2))
    and for chains with a state-independent maximum transition probability;
    otherwise the average min-entropy at the largest enumerable n is
    returned, flagged as an approximation.
    """
    if params.has_uniform_noise() and params.is_positive():
        return LimitEstimate(-math.log2(1.0 - params.beta / 2.0), True,
                             "uniform_noise_positive")
    oracle = build_oracle(params)
    if is_simtp(oracle, tol):
        peak = np.maximum(oracle.transition, 1.0 - oracle.transition)
        return LimitEstimate(-math.log2(float(peak.max())), True, "simtp")
    n_tail = MAX_ENUMERATION_BITS - params.p - 1
    per_bit, _ = avg_min_entropy(oracle, n_tail)
    return LimitEstimate(per_bit, False, f"avg_min_entropy_tail(n={n_tail})")


def entropy_report(params: GbarParams, n: int,
                   oracle: MarkovOracle | None = None) -> EntropyReport:
    """Convenience bundle of every exact quantity for one (params, n)."""
    if oracle is None:
        oracle = build_oracle(params)
    h_avg, h_total = avg_min_entropy(oracle, n)
    limit = min_entropy_limit(params)
    return EntropyReport(
        p=oracle.p,
        n=n,
        h_min=min_entropy(oracle, n),
        h_avg=h_avg,
        h_worst=worst_case_min_entropy(oracle, n),
        h_avg_total=h_total,
        h_limit=limit.value,
        limit_exact=limit.exact,
        method="exact",
    )
