"""Min-entropy analysis of correlated binary sources.

Simulates gbAR(p) binary autoregressive processes, computes their
min-entropy / average min-entropy / worst-case min-entropy exactly and by
Monte Carlo, and estimates min-entropy from predictors (four SP 800-90B
style next-bit predictors plus a tabular multi-bit predictor with joint and
greedy decoding).
"""

from .bitseq import (
    BitSequence,
    decode_context,
    decode_future,
    encode_context,
    encode_future,
)
from .errors import DimensionLimitError, GbarMinError, StationaryConvergenceError
from .generator import (
    DEFAULT_BURN_IN_BITS,
    GeneratorConfig,
    generate,
    generate_array,
    transition_prob,
    transition_table,
)
from .montecarlo import McConfig, mc_entropies
from .nist import nist_predict, nist_predict_all
from .oracle import (
    EntropyReport,
    LimitEstimate,
    MarkovOracle,
    avg_min_entropy,
    build_oracle,
    conditional_max_future,
    entropy_report,
    is_bitflip_symmetric,
    is_simtp,
    joint_future_distribution,
    min_entropy,
    min_entropy_limit,
    oracle_from_table,
    worst_case_min_entropy,
)
from .params import GbarParams, make_alpha
from .predictors import (
    CountingPredictor,
    PredictorEstimate,
    evaluate,
    evaluate_policy,
    exact_greedy_policy,
    exact_joint_policy,
    fit_counting,
    greedy_policy,
    joint_policy,
    predict_greedy,
    predict_joint,
    theoretical_guess_probability,
)

__version__ = "0.1.0"

__all__ = [
    "BitSequence",
    "CountingPredictor",
    "DEFAULT_BURN_IN_BITS",
    "DimensionLimitError",
    "EntropyReport",
    "GbarMinError",
    "GbarParams",
    "GeneratorConfig",
    "LimitEstimate",
    "MarkovOracle",
    "McConfig",
    "PredictorEstimate",
    "StationaryConvergenceError",
    "avg_min_entropy",
    "build_oracle",
    "conditional_max_future",
    "decode_context",
    "decode_future",
    "encode_context",
    "encode_future",
    "entropy_report",
    "evaluate",
    "evaluate_policy",
    "exact_greedy_policy",
    "exact_joint_policy",
    "fit_counting",
    "generate",
    "generate_array",
    "greedy_policy",
    "is_bitflip_symmetric",
    "is_simtp",
    "joint_future_distribution",
    "joint_policy",
    "make_alpha",
    "mc_entropies",
    "min_entropy",
    "min_entropy_limit",
    "nist_predict",
    "nist_predict_all",
    "oracle_from_table",
    "predict_greedy",
    "predict_joint",
    "theoretical_guess_probability",
    "transition_prob",
    "transition_table",
    "worst_case_min_entropy",
]
