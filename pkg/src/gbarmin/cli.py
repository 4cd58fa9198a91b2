"""Command-line interface.

Subcommands: ``generate`` (sample a bit file), ``exact`` (closed-table
entropies), ``mc`` (Monte Carlo entropies), ``predict`` (counting or
SP 800-90B-style predictor estimates), ``sweep`` (figure-family grids) and
``bench`` (kernel backend comparison).  Entropy and predictor subcommands
emit rows of the shared experiment CSV schema to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import experiments, montecarlo, nist, predictors, storage
from .errors import GbarMinError
from .generator import DEFAULT_BURN_IN_BITS, GeneratorConfig, generate, generate_array
from .montecarlo import McConfig
from .oracle import entropy_report
from .params import ALPHA_SHAPES, GbarParams, make_alpha


def _add_params_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model parameters")
    group.add_argument("--params", type=Path,
                       help="JSON file with {alpha, beta, epsilon}")
    group.add_argument("--alpha", type=str,
                       help="comma-separated coefficients, e.g. '0.25,-0.25'")
    group.add_argument("--shape", choices=ALPHA_SHAPES,
                       help="autocorrelation shape (with --p and --mass)")
    group.add_argument("--p", type=int, help="model order for --shape")
    group.add_argument("--mass", type=float, help="total |alpha| for --shape")
    group.add_argument("--sign-pattern", type=str,
                       help="+/- string for --shape, e.g. '+-'")
    group.add_argument("--epsilon", type=float, default=0.5,
                       help="noise-bit success probability (default 0.5)")


def _resolve_params(args) -> GbarParams:
    if args.params is not None:
        return storage.load_params(args.params)
    if args.alpha is not None:
        alpha = [float(tok) for tok in args.alpha.split(",") if tok.strip()]
        return GbarParams.from_alpha(alpha, epsilon=args.epsilon)
    if args.shape is not None:
        if args.p is None or args.mass is None:
            raise SystemExit("--shape requires --p and --mass")
        sign = None
        if args.sign_pattern:
            sign = [1 if ch == "+" else -1 for ch in args.sign_pattern]
        alpha = make_alpha(args.shape, args.p, args.mass, sign_pattern=sign)
        return GbarParams.from_alpha(alpha, epsilon=args.epsilon)
    raise SystemExit("specify the model via --params, --alpha, or --shape")


def _emit_rows(rows, out: Path | None) -> None:
    if out is not None:
        storage.write_rows(out, rows)
        return
    writer = csv.DictWriter(sys.stdout, fieldnames=storage.EXPERIMENT_COLUMNS)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def _parse_n_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or any(n < 0 for n in out):
        raise SystemExit(f"invalid n list {text!r}")
    return out


def cmd_generate(args) -> int:
    params = _resolve_params(args)
    cfg = GeneratorConfig(params=params, num_bits=args.bits, seed=args.seed,
                          burn_in_bits=args.burn_in)
    bits = generate(cfg)
    storage.write_bit_file(args.out, bits, cfg)
    print(f"wrote {len(bits)} bits to {args.out}")
    return 0


def cmd_exact(args) -> int:
    params = _resolve_params(args)
    rows = []
    for n in _parse_n_list(args.n):
        report = entropy_report(params, n)
        rows.append(storage.make_row(p=params.p, beta=params.beta,
                                     epsilon=params.epsilon,
                                     **storage.report_fields(report)))
    _emit_rows(rows, args.out)
    return 0


def cmd_mc(args) -> int:
    params = _resolve_params(args)
    rows = []
    for n in _parse_n_list(args.n):
        cfg = McConfig(params=params, n=n, num_samples=args.samples,
                       sample_bits=args.sample_bits, base_seed=args.seed)
        report = montecarlo.mc_entropies(cfg, empirical_avg=args.empirical_avg)
        rows.append(storage.make_row(p=params.p, beta=params.beta,
                                     epsilon=params.epsilon, seed=args.seed,
                                     **storage.report_fields(report)))
    _emit_rows(rows, args.out)
    return 0


def cmd_predict(args) -> int:
    params = _resolve_params(args)
    rows = []
    if args.predictor == "counting":
        if args.test_seed == args.seed:
            print("warning: train and test seeds are equal; streams overlap",
                  file=sys.stderr)
        train = generate_array(GeneratorConfig(
            params=params, num_bits=args.train_bits, seed=args.seed))
        test = generate_array(GeneratorConfig(
            params=params, num_bits=args.test_bits, seed=args.test_seed))
        p_model = args.p_model or params.p
        pred = predictors.fit_counting(train, p_model, args.target_bits)
        for strategy in args.strategy:
            est = predictors.evaluate(pred, test, strategy=strategy,
                                      stride=args.stride)
            rows.append(storage.make_row(
                beta=params.beta, epsilon=params.epsilon, p=params.p,
                method="predict", seed=args.seed,
                train_bits=args.train_bits, test_bits=args.test_bits,
                **storage.estimate_fields(est)))
    else:
        stream = generate_array(GeneratorConfig(
            params=params, num_bits=args.stream_bits, seed=args.seed))
        est = nist.nist_predict(stream, args.predictor)
        rows.append(storage.make_row(
            beta=params.beta, epsilon=params.epsilon, p=params.p,
            method="nist", seed=args.seed, stream_bits=args.stream_bits,
            **storage.estimate_fields(est)))
    _emit_rows(rows, args.out)
    return 0


def cmd_sweep(args) -> int:
    if (args.spec is None) == (args.family is None):
        raise SystemExit("specify exactly one of --spec or --family")
    if args.spec is not None:
        spec = experiments.ExperimentSpec.from_file(args.spec)
    else:
        spec = experiments.load_preset(args.family)
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    csv_path = experiments.run_sweep(spec, args.out, jobs=args.jobs)
    print(f"wrote {csv_path}")
    return 0


def cmd_bench(args) -> int:
    from . import bench
    bench.run(num_bits=args.bits, repeats=args.repeat)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbarmin",
        description="Min-entropy analysis of correlated binary sources",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="sample a gbAR(p) bit file")
    _add_params_args(p_gen)
    p_gen.add_argument("--bits", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN_BITS)
    p_gen.add_argument("--out", type=Path, required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_exact = sub.add_parser("exact", help="exact entropies for future lengths")
    _add_params_args(p_exact)
    p_exact.add_argument("--n", type=str, required=True,
                         help="future lengths, e.g. '0,4,8' or '0-16'")
    p_exact.add_argument("--out", type=Path)
    p_exact.set_defaults(func=cmd_exact)

    p_mc = sub.add_parser("mc", help="Monte Carlo entropies")
    _add_params_args(p_mc)
    p_mc.add_argument("--n", type=str, required=True)
    p_mc.add_argument("--samples", type=int, default=montecarlo.DEFAULT_NUM_SAMPLES)
    p_mc.add_argument("--sample-bits", type=int,
                      default=montecarlo.DEFAULT_SAMPLE_BITS)
    p_mc.add_argument("--seed", type=int, default=0)
    p_mc.add_argument("--empirical-avg", action="store_true",
                      help="fully empirical average instead of the hybrid")
    p_mc.add_argument("--out", type=Path)
    p_mc.set_defaults(func=cmd_mc)

    p_pred = sub.add_parser("predict", help="predictor-based estimates")
    _add_params_args(p_pred)
    p_pred.add_argument("--predictor", default="counting",
                        choices=("counting",) + nist.PREDICTOR_NAMES)
    p_pred.add_argument("--target-bits", type=int, default=1)
    p_pred.add_argument("--strategy", nargs="+", default=["joint"],
                        choices=("joint", "greedy"))
    p_pred.add_argument("--p-model", type=int)
    p_pred.add_argument("--stride", type=int)
    p_pred.add_argument("--train-bits", type=int, default=1_000_000)
    p_pred.add_argument("--test-bits", type=int, default=250_000)
    p_pred.add_argument("--stream-bits", type=int, default=1_000_000,
                        help="stream length for the SP 800-90B predictors")
    p_pred.add_argument("--seed", type=int, default=0)
    p_pred.add_argument("--test-seed", type=int, default=1)
    p_pred.add_argument("--out", type=Path)
    p_pred.set_defaults(func=cmd_predict)

    p_sweep = sub.add_parser("sweep", help="run a figure-family grid")
    p_sweep.add_argument("--spec", type=Path, help="sweep spec JSON")
    p_sweep.add_argument("--family", choices=experiments.FAMILIES)
    p_sweep.add_argument("--out", type=Path, required=True)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_bench = sub.add_parser("bench", help="compare kernel backends")
    p_bench.add_argument("--bits", type=int, default=2_000_000)
    p_bench.add_argument("--repeat", type=int, default=3)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GbarMinError, ValueError) as exc:
        raise SystemExit(f"error: {exc}")


if __name__ == "__main__":
    sys.exit(main())
