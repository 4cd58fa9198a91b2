"""Monte Carlo estimation of min-entropy quantities from simulated data.

Generates independent samples, pools sliding-window counts of
(p + n + 1)-bit windows across them (stride 1), and reads the entropies off
the pooled table.  The average min-entropy estimator is a hybrid: empirical
context frequencies weighted by the exact per-context maximum conditional
probability from the transition law.  A fully empirical variant is exposed
behind ``empirical_avg`` for sensitivity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DimensionLimitError
from .generator import DEFAULT_BURN_IN_BITS, GeneratorConfig, generate_array
from .oracle import (
    MAX_ENUMERATION_BITS,
    EntropyReport,
    build_oracle,
    conditional_max_future,
    min_entropy_limit,
)
from .params import GbarParams

DEFAULT_NUM_SAMPLES = 100
DEFAULT_SAMPLE_BITS = 800_000  # 1e5 bytes per sample


@dataclass(frozen=True)
class McConfig:
    params: GbarParams
    n: int
    num_samples: int = DEFAULT_NUM_SAMPLES
    sample_bits: int = DEFAULT_SAMPLE_BITS
    base_seed: int = 0
    burn_in_bits: int = DEFAULT_BURN_IN_BITS

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.num_samples < 1:
            raise ValueError(f"num_samples must be >= 1, got {self.num_samples}")
        window = self.params.p + self.n + 1
        if self.sample_bits < window:
            raise ValueError(
                f"sample_bits={self.sample_bits} shorter than one window ({window})"
            )
        if max(self.params.p, self.n + 1) > MAX_ENUMERATION_BITS:
            raise DimensionLimitError(
                f"context/future width exceeds the {MAX_ENUMERATION_BITS}-bit "
                "frequency-table cap"
            )

    @property
    def pooled_window_fits(self) -> bool:
        """True when the full (p + n + 1)-bit joint table fits the cap."""
        return self.params.p + self.n + 1 <= MAX_ENUMERATION_BITS


def _strided_window_counts(bits: np.ndarray, width: int, stride: int) -> np.ndarray:
    n_win = bits.shape[0] - width + 1
    values = np.zeros(n_win, dtype=np.int64)
    for j in range(width):
        values += bits[j:j + n_win].astype(np.int64) << (width - 1 - j)
    return np.bincount(values[::stride], minlength=1 << width)


def pooled_window_counts(cfg: McConfig, window_stride: int = 1) -> np.ndarray:
    """Counts of (p + n + 1)-bit windows pooled over all samples.

    ``window_stride=1`` (the default) slides with maximal overlap; the
    window width gives disjoint blocks instead.
    """
    if not cfg.pooled_window_fits:
        raise DimensionLimitError(
            f"window width {cfg.params.p + cfg.n + 1} exceeds the "
            f"{MAX_ENUMERATION_BITS}-bit frequency-table cap"
        )
    if window_stride < 1:
        raise ValueError("window_stride must be >= 1")
    width = cfg.params.p + cfg.n + 1
    count_kernel = _backend.kernel("count_windows")
    counts = np.zeros(1 << width, dtype=np.int64)
    for s in range(cfg.num_samples):
        bits = generate_array(GeneratorConfig(
            params=cfg.params,
            num_bits=cfg.sample_bits,
            seed=cfg.base_seed + s,
            burn_in_bits=cfg.burn_in_bits,
        ))
        if window_stride == 1:
            counts += count_kernel(bits, width)
        else:
            counts += _strided_window_counts(bits, width, window_stride)
    return counts


def _split_window_counts(cfg: McConfig) -> tuple[np.ndarray, np.ndarray]:
    """Context and future marginals without materializing the joint table.

    Counts exactly the windows the pooled table would marginalize: contexts
    at positions 0..L-(p+n+1), futures at positions p..L-(n+1).  Used when
    p + n + 1 exceeds the joint-table cap.
    """
    p = cfg.params.p
    width_fut = cfg.n + 1
    count_kernel = _backend.kernel("count_windows")
    ctx_counts = np.zeros(1 << p, dtype=np.int64)
    fut_counts = np.zeros(1 << width_fut, dtype=np.int64)
    for s in range(cfg.num_samples):
        bits = generate_array(GeneratorConfig(
            params=cfg.params,
            num_bits=cfg.sample_bits,
            seed=cfg.base_seed + s,
            burn_in_bits=cfg.burn_in_bits,
        ))
        ctx_counts += count_kernel(bits[: bits.size - width_fut], p)
        fut_counts += count_kernel(bits[p:], width_fut)
    return ctx_counts, fut_counts


def mc_entropies(cfg: McConfig, empirical_avg: bool = False,
                 window_stride: int = 1) -> EntropyReport:
    """Estimate h_min / h_avg / h_worst from pooled window frequencies.

    ``window_stride`` switches between maximally overlapped counting (1,
    the default) and sparser striding (the window width gives disjoint
    blocks); overlap squeezes more windows out of each sample at the cost
    of correlated counts.
    """
    p = cfg.params.p
    n = cfg.n
    warnings = ()
    oracle = build_oracle(cfg.params)
    exact_max, _ = conditional_max_future(oracle, n)

    if cfg.pooled_window_fits:
        counts = pooled_window_counts(cfg, window_stride=window_stride)
        counts = counts.reshape(1 << p, 1 << (n + 1))
        total = int(counts.sum())
        future_counts = counts.sum(axis=0)
        context_counts = counts.sum(axis=1)
    else:
        if empirical_avg:
            raise DimensionLimitError(
                "the fully empirical average needs the joint window table, "
                f"which exceeds the {MAX_ENUMERATION_BITS}-bit cap here"
            )
        if window_stride != 1:
            raise DimensionLimitError(
                "strided counting is only available for the pooled table"
            )
        counts = None
        context_counts, future_counts = _split_window_counts(cfg)
        total = int(context_counts.sum())
        warnings += ("split_window_tables",)

    h_min = -math.log2(future_counts.max() / total) / (n + 1)

    observed = context_counts > 0
    if not observed.all():
        warnings += (f"unseen_contexts={int((~observed).sum())}",)

    if empirical_avg:
        # max over rows, each normalized by its own context count: the
        # context weights cancel into max counts over the grand total
        guess = counts.max(axis=1).sum() / total
    else:
        guess = float((context_counts / total) @ exact_max)
    h_total = -math.log2(guess)
    h_avg = h_total / (n + 1)

    if counts is not None:
        cond_peak = counts[observed].max(axis=1) / context_counts[observed]
        h_worst = -math.log2(float(cond_peak.max())) / (n + 1)
    else:
        # joint table unavailable: fall back to the exact conditional peak
        h_worst = -math.log2(float(exact_max.max())) / (n + 1)
        warnings += ("h_worst_from_exact_conditionals",)

    limit = min_entropy_limit(cfg.params)
    return EntropyReport(
        p=p,
        n=n,
        h_min=h_min,
        h_avg=h_avg,
        h_worst=h_worst,
        h_avg_total=h_total,
        h_limit=limit.value,
        limit_exact=limit.exact,
        method="mc",
        num_samples=cfg.num_samples,
        sample_bits=cfg.sample_bits,
        warnings=warnings,
    )
