"""Model parameters for generalized binary autoregressive (gbAR) processes.

A gbAR(p) process is parameterized by lag coefficients ``alpha`` (each in
(-1, 1), negative values meaning anticorrelation with that lag), a noise
weight ``beta`` in (0, 1], and the Bernoulli success probability ``epsilon``
of the noise bit.  The absolute lag weights and the noise weight form a
probability vector: sum(|alpha_i|) + beta == 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

NORMALIZATION_TOL = 1e-12

ALPHA_SHAPES = ("point_to_point", "uniform", "exponential", "gaussian")


@dataclass(frozen=True)
class GbarParams:
    """Validated gbAR(p) parameter set.

    Immutable after construction; all invariants are checked eagerly so a
    constructed instance is always usable by the generator and the oracles.
    """

    alpha: tuple[float, ...]
    beta: float
    epsilon: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if len(self.alpha) < 1:
            raise ValueError("alpha must contain at least one coefficient (p >= 1)")
        for a in self.alpha:
            if not abs(a) < 1.0:
                raise ValueError(f"every |alpha_i| must be < 1, got {a}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        total = math.fsum(abs(a) for a in self.alpha) + self.beta
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"sum(|alpha|) + beta must equal 1 within {NORMALIZATION_TOL}, got {total!r}"
            )

    @property
    def p(self) -> int:
        """Model order (number of lags)."""
        return len(self.alpha)

    @property
    def abs_alpha(self) -> np.ndarray:
        return np.abs(np.asarray(self.alpha, dtype=np.float64))

    def is_positive(self) -> bool:
        """True when every lag coefficient is non-negative."""
        return all(a >= 0.0 for a in self.alpha)

    def has_uniform_noise(self) -> bool:
        """True when the noise bit is unbiased (epsilon == 1/2)."""
        return abs(self.epsilon - 0.5) <= NORMALIZATION_TOL

    @classmethod
    def from_alpha(cls, alpha, epsilon: float = 0.5) -> "GbarParams":
        """Build params with beta inferred as 1 - sum(|alpha|)."""
        alpha = tuple(float(a) for a in alpha)
        beta = 1.0 - math.fsum(abs(a) for a in alpha)
        return cls(alpha=alpha, beta=beta, epsilon=epsilon)

    def to_json(self) -> str:
        return json.dumps(
            {"alpha": list(self.alpha), "beta": self.beta, "epsilon": self.epsilon}
        )

    @classmethod
    def from_json(cls, text: str) -> "GbarParams":
        """Parse and validate the JSON document {"alpha": [...], "beta": r, "epsilon": r}."""
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ValueError("params document must be a JSON object")
        missing = {"alpha", "beta", "epsilon"} - doc.keys()
        if missing:
            raise ValueError(f"params document missing fields: {sorted(missing)}")
        return cls(alpha=tuple(doc["alpha"]), beta=float(doc["beta"]),
                   epsilon=float(doc["epsilon"]))


def make_alpha(shape: str, p: int, total_mass: float, sign_pattern=None) -> list[float]:
    """Build a lag-coefficient vector of the named autocorrelation shape.

    Parameters
    ----------
    shape : str
        One of ``point_to_point`` (all mass on lag p), ``uniform`` (equal
        mass per lag), ``exponential`` (mass decaying as exp(-i / (p/2))) or
        ``gaussian`` (mass decaying as exp(-(i / (p/2))**2)).  The decay
        scales are fixed constants so sweeps stay reproducible.
    p : int
        Number of lags, >= 1.
    total_mass : float
        Target sum of |alpha_i|, in (0, 1).
    sign_pattern : sequence of +/-1, optional
        Per-lag signs; defaults to all +1.

    Returns
    -------
    list of float
        Coefficients with sum(|alpha_i|) == total_mass.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not 0.0 < total_mass < 1.0:
        raise ValueError(f"total_mass must be in (0, 1), got {total_mass}")
    if shape not in ALPHA_SHAPES:
        raise ValueError(f"unknown shape {shape!r}, expected one of {ALPHA_SHAPES}")

    if shape == "point_to_point":
        weights = np.zeros(p)
        weights[-1] = 1.0
    elif shape == "uniform":
        weights = np.ones(p)
    elif shape == "exponential":
        weights = np.exp(-np.arange(1, p + 1) / (p / 2.0))
    else:  # gaussian
        weights = np.exp(-((np.arange(1, p + 1) / (p / 2.0)) ** 2))

    alpha = total_mass * weights / weights.sum()

    if sign_pattern is not None:
        signs = [int(s) for s in sign_pattern]
        if len(signs) != p:
            raise ValueError(f"sign_pattern must have length {p}, got {len(signs)}")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("sign_pattern entries must be +1 or -1")
        alpha = alpha * np.asarray(signs, dtype=np.float64)

    return [float(a) for a in alpha]
