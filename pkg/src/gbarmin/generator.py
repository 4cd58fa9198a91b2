"""Sampling binary sequences from a gbAR(p) process.

Each step draws one multinomial selection over (|alpha_1|, ..., |alpha_p|,
beta): picking lag i copies X_{t-i} (XOR-flipped when alpha_i < 0), picking
the noise slot emits a fresh Bernoulli(epsilon) bit.  The stream is seeded
with a counter-based Philox generator so runs replay exactly; all random
draws happen up front, which also guarantees the numba and numpy kernel
backends emit identical bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .bitseq import BitSequence
from .params import GbarParams

DEFAULT_BURN_IN_BITS = 80_000  # 1e4 bytes of warm-up, discarded


@dataclass(frozen=True)
class GeneratorConfig:
    params: GbarParams
    num_bits: int
    seed: int = 0
    burn_in_bits: int = DEFAULT_BURN_IN_BITS

    def __post_init__(self):
        if self.num_bits <= 0:
            raise ValueError(f"num_bits must be positive, got {self.num_bits}")
        if self.burn_in_bits < 0:
            raise ValueError(f"burn_in_bits must be >= 0, got {self.burn_in_bits}")


def transition_prob(params: GbarParams, context: int, x: int) -> float:
    """Exact one-step conditional P(X_t = x | context).

    ``context`` encodes (x_{t-1}, ..., x_{t-p}) with the most recent bit in
    the lowest position.  P(x=0) is computed as the exact complement of
    P(x=1), so the two always sum to 1.0.
    """
    p = params.p
    if not 0 <= context < (1 << p):
        raise ValueError(f"context {context} out of range for p={p}")
    if x not in (0, 1):
        raise ValueError(f"x must be 0 or 1, got {x}")
    p_one = params.beta * params.epsilon
    for i in range(1, p + 1):
        lag_bit = (context >> (i - 1)) & 1
        a = params.alpha[i - 1]
        if a >= 0:
            p_one += abs(a) * lag_bit
        else:
            p_one += abs(a) * (1 - lag_bit)
    return p_one if x == 1 else 1.0 - p_one


def transition_table(params: GbarParams) -> np.ndarray:
    """Vector of P(X_t = 1 | context) over all 2^p contexts."""
    p = params.p
    contexts = np.arange(1 << p, dtype=np.int64)
    table = np.full(1 << p, params.beta * params.epsilon, dtype=np.float64)
    for i in range(1, p + 1):
        lag_bit = (contexts >> (i - 1)) & 1
        a = params.alpha[i - 1]
        if a >= 0:
            table += abs(a) * lag_bit
        else:
            table += abs(a) * (1 - lag_bit)
    return table


def generate_array(cfg: GeneratorConfig) -> np.ndarray:
    """Like :func:`generate` but returning a uint8 0/1 array."""
    params = cfg.params
    p = params.p
    total = cfg.burn_in_bits + cfg.num_bits
    rng = np.random.Generator(np.random.Philox(key=np.uint64(cfg.seed)))

    # draw order is part of the format: initial state, selections, noise
    init = (rng.random(p) < params.epsilon).astype(np.uint8)
    cum = np.cumsum(params.abs_alpha)
    sel = np.searchsorted(cum, rng.random(total), side="right").astype(np.int64)
    np.minimum(sel, p, out=sel)  # float round-off on the last edge -> noise
    noise = (rng.random(total) < params.epsilon).astype(np.uint8)
    flip = (np.asarray(params.alpha) < 0).astype(np.uint8)

    kernel = _backend.kernel("generate_bits")
    return kernel(sel, flip, noise, init, p, cfg.burn_in_bits)


def generate(cfg: GeneratorConfig) -> BitSequence:
    """Sample ``cfg.num_bits`` bits after burn-in; deterministic per seed."""
    return BitSequence.from_bits(generate_array(cfg))
