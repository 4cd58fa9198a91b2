"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run as ``python -m gbarmin.bench`` or ``gbarmin bench``.  Results are
wall-clock medians over ``repeats`` runs after a warm-up call (which also
absorbs JIT compilation for the numba backend).
"""

from __future__ import annotations

import time

import numpy as np

from . import _backend
from .generator import GeneratorConfig, generate_array
from .params import GbarParams, make_alpha


def _time(fn, repeats: int) -> float:
    fn()  # warm-up / JIT
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def run(num_bits: int = 2_000_000, repeats: int = 3) -> None:
    params = GbarParams.from_alpha(make_alpha("uniform", 10, 0.5))
    cfg = GeneratorConfig(params=params, num_bits=num_bits, seed=7,
                          burn_in_bits=0)

    rng = np.random.Generator(np.random.Philox(key=7))
    total = cfg.num_bits
    init = (rng.random(params.p) < params.epsilon).astype(np.uint8)
    sel = np.searchsorted(np.cumsum(params.abs_alpha), rng.random(total),
                          side="right").astype(np.int64)
    np.minimum(sel, params.p, out=sel)
    noise = (rng.random(total) < params.epsilon).astype(np.uint8)
    flip = (np.asarray(params.alpha) < 0).astype(np.uint8)
    bits = generate_array(cfg)
    nist_bits = bits[: min(num_bits, 200_000)]
    windows = np.asarray([63, 255, 1023, 4095], dtype=np.int64)

    cases = [
        ("generate_bits",
         lambda k: k.generate_bits(sel, flip, noise, init, params.p, 0)),
        ("count_windows(19)", lambda k: k.count_windows(bits, 19)),
        ("nist_multimcw", lambda k: k.nist_multimcw(nist_bits, windows)),
        ("nist_lag", lambda k: k.nist_lag(nist_bits, 128)),
        ("nist_multimmc", lambda k: k.nist_multimmc(nist_bits, 16, 100_000)),
        ("nist_lz78y", lambda k: k.nist_lz78y(nist_bits, 16, 65_536)),
    ]

    backends = {}
    for name in ("numba", "numpy"):
        try:
            backends[name] = _backend.load_backend(name)
        except Exception as exc:
            print(f"backend {name} unavailable: {exc}")

    print(f"bits={num_bits} (predictors on {nist_bits.size}), "
          f"median of {repeats} runs")
    header = f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends)
    print(header)
    print("-" * len(header))
    for label, call in cases:
        cells = []
        results = []
        for mod in backends.values():
            results.append(np.asarray(call(mod)))
            cells.append(f"{_time(lambda: call(mod), repeats):>11.4f}s")
        agree = all(np.array_equal(results[0], r) for r in results[1:])
        print(f"{label:<20}" + "".join(cells) + ("" if agree else "  MISMATCH"))


if __name__ == "__main__":
    run()
