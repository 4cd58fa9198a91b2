"""Parameter sweeps producing the per-figure-family CSV artifacts.

A sweep spec is a JSON document pinning the grid axes (shape, p, alpha
mass, sign pattern, future length), the methods to run at each grid point
(exact / mc / predict / nist), method sizes, and a base seed.  Every point
derives its own seed from a digest of (base seed, point config), so results
replay byte-for-byte regardless of execution order or worker count.
Timestamps and host info land in a separate run_meta.json to keep the CSVs
stable under replay.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import platform
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import _backend, montecarlo, nist, predictors, storage
from .generator import GeneratorConfig, generate_array
from .montecarlo import McConfig
from .oracle import MAX_ENUMERATION_BITS, build_oracle, entropy_report
from .params import GbarParams, make_alpha

FAMILIES = ("fig1", "fig2", "fig4", "fig5")
METHODS = ("exact", "mc", "predict", "nist")


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    seed: int = 0
    epsilon: float = 0.5
    shapes: tuple[str, ...] = ("uniform",)
    p_values: tuple[int, ...] = ()
    alpha_masses: tuple[float, ...] = ()
    sign_patterns: tuple[tuple[int, ...] | None, ...] = (None,)
    n_values: tuple[int, ...] = ()
    target_bits_values: tuple[int, ...] = ()
    methods: tuple[str, ...] = ("exact",)
    mc_num_samples: int = montecarlo.DEFAULT_NUM_SAMPLES
    mc_sample_bits: int = montecarlo.DEFAULT_SAMPLE_BITS
    predictor_train_bits: int = 10_000_000
    predictor_test_bits: int = 2_500_000
    predictor_p_model: int | None = None
    predictor_strategies: tuple[str, ...] = ("joint",)
    predictor_stride: int | None = None
    nist_stream_bits: int = 1_000_000
    nist_predictors: tuple[str, ...] = nist.PREDICTOR_NAMES
    nist_tool_cmd: tuple[str, ...] | None = None

    def __post_init__(self):
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}; expected {METHODS}")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        doc = dict(doc)
        for key in ("shapes", "p_values", "alpha_masses", "n_values",
                    "target_bits_values", "methods", "predictor_strategies",
                    "nist_predictors"):
            if key in doc and doc[key] is not None:
                doc[key] = tuple(doc[key])
        if "sign_patterns" in doc and doc["sign_patterns"] is not None:
            doc["sign_patterns"] = tuple(
                None if s is None else tuple(int(v) for v in s)
                for s in doc["sign_patterns"]
            )
        if doc.get("nist_tool_cmd") is not None:
            doc["nist_tool_cmd"] = tuple(doc["nist_tool_cmd"])
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def with_seed(self, seed: int) -> "ExperimentSpec":
        return dataclasses.replace(self, seed=seed)


def load_preset(family: str) -> ExperimentSpec:
    """Checked-in desk-scale spec for one figure family."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    text = resources.files("gbarmin.presets").joinpath(f"{family}.json").read_text(
        encoding="utf-8")
    return ExperimentSpec.from_dict(json.loads(text))


def _sign_label(sign) -> str:
    if sign is None:
        return ""
    return "".join("+" if s > 0 else "-" for s in sign)


def build_points(spec: ExperimentSpec) -> list[dict]:
    """Expand the grid into an ordered list of independent work items."""
    points = []
    for shape in spec.shapes:
        for p in spec.p_values:
            for mass in spec.alpha_masses:
                for sign in spec.sign_patterns:
                    if sign is not None and len(sign) != p:
                        continue
                    base = {"shape": shape, "p": p, "mass": mass, "sign": sign}
                    for method in spec.methods:
                        if method in ("exact", "mc"):
                            for n in spec.n_values:
                                points.append({**base, "method": method, "n": n})
                        elif method == "predict":
                            for tb in spec.target_bits_values:
                                points.append({**base, "method": method, "n": tb - 1})
                        else:  # nist: one run per parameter set
                            points.append({**base, "method": method, "n": 0})
    for index, point in enumerate(points):
        point["index"] = index
    return points


def _point_doc(spec: ExperimentSpec, point: dict) -> dict:
    return {
        "base_seed": spec.seed,
        "epsilon": spec.epsilon,
        "method": point["method"],
        "shape": point["shape"],
        "p": point["p"],
        "mass": point["mass"],
        "sign": list(point["sign"]) if point["sign"] is not None else None,
        "n": point["n"],
    }


def point_seed(spec: ExperimentSpec, point: dict) -> int:
    doc = json.dumps(_point_doc(spec, point), sort_keys=True)
    digest = hashlib.sha256(doc.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def point_params(spec: ExperimentSpec, point: dict) -> GbarParams:
    alpha = make_alpha(point["shape"], point["p"], point["mass"],
                       sign_pattern=point["sign"])
    return GbarParams.from_alpha(alpha, epsilon=spec.epsilon)


def run_point(spec: ExperimentSpec, point: dict, out_dir: Path | None = None) -> list[dict]:
    """Execute one grid point, returning finished CSV rows."""
    params = point_params(spec, point)
    seed = point_seed(spec, point)
    chash = storage.config_hash(_point_doc(spec, point))
    common = {
        "point_index": point["index"],
        "family": spec.name,
        "alpha_shape": point["shape"],
        "alpha_mass": point["mass"],
        "sign_pattern": _sign_label(point["sign"]),
        "beta": params.beta,
        "epsilon": params.epsilon,
        "p": params.p,
        "seed": seed,
        "config_hash": chash,
    }
    method = point["method"]
    n = point["n"]

    if method == "exact" and params.p + n + 1 > MAX_ENUMERATION_BITS:
        method = "mc"  # too wide to enumerate: route to Monte Carlo

    if method == "exact":
        report = entropy_report(params, n)
        return [storage.make_row(**common, **storage.report_fields(report))]

    if method == "mc":
        cfg = McConfig(params=params, n=n, num_samples=spec.mc_num_samples,
                       sample_bits=spec.mc_sample_bits, base_seed=seed)
        report = montecarlo.mc_entropies(cfg)
        fields = storage.report_fields(report)
        if point["method"] == "exact":
            fields["warnings"] = ";".join((*report.warnings, "routed_from_exact"))
        return [storage.make_row(**common, **fields)]

    if method == "predict":
        target_bits = n + 1
        p_model = spec.predictor_p_model or params.p
        test = generate_array(GeneratorConfig(
            params=params, num_bits=spec.predictor_test_bits, seed=seed + 1))
        trained = [s for s in spec.predictor_strategies
                   if s in ("joint", "greedy")]
        exact = [s for s in spec.predictor_strategies
                 if s in ("exact_joint", "exact_greedy")]
        pred = None
        if trained:
            train = generate_array(GeneratorConfig(
                params=params, num_bits=spec.predictor_train_bits, seed=seed))
            pred = predictors.fit_counting(train, p_model, target_bits)
        rows = []
        for strategy in spec.predictor_strategies:
            if strategy in ("joint", "greedy"):
                est = predictors.evaluate(pred, test, strategy=strategy,
                                          stride=spec.predictor_stride)
            elif strategy in ("exact_joint", "exact_greedy"):
                # decoding comparison on exact probabilities: deterministic
                # policies, empirical accuracy
                oracle = build_oracle(params)
                if strategy == "exact_joint":
                    policy = predictors.exact_joint_policy(oracle, target_bits)
                else:
                    policy = predictors.exact_greedy_policy(oracle, target_bits)
                est = predictors.evaluate_policy(
                    policy, test, params.p, target_bits,
                    stride=spec.predictor_stride, name="exact",
                    strategy=strategy)
            else:
                raise ValueError(f"unknown predictor strategy {strategy!r}")
            rows.append(storage.make_row(
                **common, method="predict",
                train_bits=spec.predictor_train_bits if strategy in
                ("joint", "greedy") else None,
                test_bits=spec.predictor_test_bits,
                **storage.estimate_fields(est)))
        return rows

    # nist
    stream = generate_array(GeneratorConfig(
        params=params, num_bits=spec.nist_stream_bits, seed=seed))
    tool_file = None
    if spec.nist_tool_cmd and out_dir is not None:
        tool_file = _run_nist_tool(spec, stream, chash, out_dir)
    rows = []
    for name in spec.nist_predictors:
        est = nist.nist_predict(stream, name)
        rows.append(storage.make_row(
            **common, method="nist", stream_bits=spec.nist_stream_bits,
            tool_output_file=tool_file, **storage.estimate_fields(est)))
    return rows


def _run_nist_tool(spec: ExperimentSpec, stream, chash: str, out_dir: Path) -> str:
    """Optional subprocess hook: hand the raw stream to an external
    assessment binary and record its stdout verbatim."""
    from .bitseq import BitSequence

    out_dir = Path(out_dir)
    data_path = out_dir / f"{chash}.bits.bin"
    storage.write_bit_file(data_path, BitSequence.from_bits(stream))
    cmd = [part.replace("{data}", str(data_path)) for part in spec.nist_tool_cmd]
    result = subprocess.run(cmd, capture_output=True, text=True, check=True)
    tool_path = out_dir / f"{chash}.nist_tool.txt"
    tool_path.write_text(result.stdout, encoding="utf-8")
    return tool_path.name


def _run_point_task(args):
    spec, point, out_dir = args
    try:
        return point["index"], run_point(spec, point, out_dir)
    except Exception as exc:  # record and continue with remaining points
        row = storage.make_row(
            point_index=point["index"], family=spec.name,
            method=point["method"], alpha_shape=point["shape"],
            alpha_mass=point["mass"], sign_pattern=_sign_label(point["sign"]),
            n=point["n"], error=f"{type(exc).__name__}: {exc}")
        return point["index"], [row]


def run_sweep(spec: ExperimentSpec, out_dir, jobs: int = 1) -> Path:
    """Run the full grid; returns the path of the consolidated CSV."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    points = build_points(spec)
    started = time.time()

    tasks = [(spec, point, out_dir) for point in points]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point_task, tasks))
    else:
        results = [_run_point_task(t) for t in tasks]

    rows = []
    for _, point_rows in sorted(results, key=lambda item: item[0]):
        rows.extend(point_rows)

    csv_path = out_dir / f"{spec.name}.csv"
    storage.write_rows(csv_path, rows)

    meta = {
        "family": spec.name,
        "spec": json.loads(json.dumps(dataclasses.asdict(spec))),
        "backend": _backend.backend_name(),
        "host": platform.node(),
        "started_unix": started,
        "elapsed_seconds": time.time() - started,
        "num_points": len(points),
    }
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=2) + "\n",
                                           encoding="utf-8")
    return csv_path
