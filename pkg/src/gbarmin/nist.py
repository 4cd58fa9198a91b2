"""SP 800-90B-style next-bit predictors: MultiMCW, Lag, MultiMMC, LZ78Y.

Each predictor runs once over the stream producing one prediction per
position after warm-up.  Two estimates come out of the run: a global one
from the 99% upper confidence bound on the prediction accuracy, and a local
one from the longest run of correct predictions; the reported entropy is
the minimum of the two, floored so it never exceeds 1 bit per bit.  All
structural constants are overridable keyword arguments.
"""

from __future__ import annotations

import math

import numpy as np

from . import _backend
from .predictors import PredictorEstimate, _as_bits, wald_ci_delta

PREDICTOR_NAMES = ("multimcw", "lag", "multimmc", "lz78y")

GLOBAL_BOUND_Z = 2.576  # 99% upper confidence bound on accuracy
LOCAL_ALPHA = 0.99

DEFAULT_MCW_WINDOWS = (63, 255, 1023, 4095)
DEFAULT_LAG_DEPTH = 128
DEFAULT_MMC_MAX_ORDER = 16
DEFAULT_MMC_MAX_ENTRIES = 100_000
DEFAULT_LZ78Y_DEPTH = 16
DEFAULT_LZ78Y_MAX_ENTRIES = 65_536


def global_prediction_bound(n_correct: int, n_pred: int,
                            z: float = GLOBAL_BOUND_Z) -> float:
    """Upper confidence bound on the global prediction probability."""
    if n_pred <= 1:
        return 1.0
    if n_correct == 0:
        return 1.0 - 0.01 ** (1.0 / n_pred)
    p = n_correct / n_pred
    return min(1.0, p + z * math.sqrt(p * (1.0 - p) / (n_pred - 1)))


def local_prediction_probability(longest_run: int, n_pred: int,
                                 alpha: float = LOCAL_ALPHA) -> float:
    """Probability implied by the longest correct run at confidence alpha.

    Bisects for the per-prediction probability p at which the chance of
    seeing no correct run of length (longest_run + 1) among n_pred
    predictions equals alpha.  The run-length generating-function root x is
    refined by ten fixed-point iterations per probe.
    """
    r = longest_run + 1
    if n_pred <= 0 or r > n_pred:
        return 1.0
    log_alpha = math.log(alpha)
    lo, hi = 0.0, 1.0
    for _ in range(80):
        p = 0.5 * (lo + hi)
        q = 1.0 - p
        x = 1.0
        for _ in range(10):
            x = 1.0 + q * (p ** r) * (x ** (r + 1))
        num = 1.0 - p * x
        den = (r + 1.0 - r * x) * q
        if num <= 0.0 or den <= 0.0:
            val = -math.inf
        else:
            val = math.log(num) - math.log(den) - (n_pred + 1) * math.log(x)
        if val < log_alpha:
            hi = p
        else:
            lo = p
    return 0.5 * (lo + hi)


def nist_predict(stream, which: str,
                 mcw_windows=DEFAULT_MCW_WINDOWS,
                 lag_depth: int = DEFAULT_LAG_DEPTH,
                 mmc_max_order: int = DEFAULT_MMC_MAX_ORDER,
                 mmc_max_entries: int = DEFAULT_MMC_MAX_ENTRIES,
                 lz78y_depth: int = DEFAULT_LZ78Y_DEPTH,
                 lz78y_max_entries: int = DEFAULT_LZ78Y_MAX_ENTRIES,
                 ) -> PredictorEstimate:
    """Run one named predictor over the stream and convert to entropies.

    Streams of at least ~1e6 bits are recommended; shorter streams raise
    once they cannot cover the predictor's warm-up.
    """
    bits = _as_bits(stream)
    if which == "multimcw":
        windows = np.asarray(sorted(mcw_windows), dtype=np.int64)
        warmup = int(windows[0]) + 1
        n_pred, n_correct, longest = _backend.kernel("nist_multimcw")(bits, windows)
    elif which == "lag":
        warmup = 2
        n_pred, n_correct, longest = _backend.kernel("nist_lag")(bits, int(lag_depth))
    elif which == "multimmc":
        warmup = 3
        n_pred, n_correct, longest = _backend.kernel("nist_multimmc")(
            bits, int(mmc_max_order), int(mmc_max_entries))
    elif which == "lz78y":
        warmup = int(lz78y_depth) + 2
        n_pred, n_correct, longest = _backend.kernel("nist_lz78y")(
            bits, int(lz78y_depth), int(lz78y_max_entries))
    else:
        raise ValueError(f"unknown predictor {which!r}, expected {PREDICTOR_NAMES}")

    if n_pred == 0:
        raise ValueError(
            f"stream of {bits.shape[0]} bits is shorter than the {which} "
            f"warm-up of {warmup} bits"
        )

    p_global = global_prediction_bound(n_correct, n_pred)
    p_local = local_prediction_probability(longest, n_pred)
    # floor at 1/2: a binary predictor cannot certify more than 1 bit/bit
    h_global = -math.log2(max(p_global, 0.5)) + 0.0
    h_local = -math.log2(max(p_local, 0.5)) + 0.0

    p_acc = n_correct / n_pred
    h_raw = math.inf if p_acc == 0.0 else -math.log2(p_acc)
    return PredictorEstimate(
        name=which,
        strategy="next_bit",
        target_bits=1,
        p_acc=p_acc,
        n_evals=int(n_pred),
        h_per_bit=h_raw,
        ci_delta=wald_ci_delta(p_acc, int(n_pred), 1),
        h_global=h_global,
        h_local=h_local,
        h_final=min(h_global, h_local),
    )


def nist_predict_all(stream, **kwargs) -> dict[str, PredictorEstimate]:
    """Run all four predictors; returns {name: estimate}."""
    return {name: nist_predict(stream, name, **kwargs) for name in PREDICTOR_NAMES}
