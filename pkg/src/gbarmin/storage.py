"""On-disk interchange: bit-packed streams with JSON sidecars, and CSV rows.

Binary format: the bit stream packed 8 bits per byte, little-endian within
each byte (lowest bit = earliest bit).  A ``<file>.json`` sidecar records
the generator configuration so downstream consumers can verify provenance
and avoid evaluating a predictor on its own training range.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .bitseq import BitSequence
from .generator import GeneratorConfig
from .oracle import EntropyReport
from .params import GbarParams
from .predictors import PredictorEstimate

BIT_FORMAT = "gbarmin-bits-v1"

# one schema for every experiment row; inapplicable fields stay empty
EXPERIMENT_COLUMNS = (
    "point_index", "family", "method", "predictor", "strategy",
    "p", "n", "target_bits", "alpha_shape", "alpha_mass", "sign_pattern",
    "beta", "epsilon", "seed", "config_hash",
    "h_min", "h_avg", "h_worst", "h_avg_total", "h_limit", "limit_exact",
    "num_samples", "sample_bits",
    "p_acc", "n_evals", "h_per_bit", "ci_delta",
    "h_global", "h_local", "h_final", "unseen_contexts",
    "train_bits", "test_bits", "stream_bits", "tool_output_file",
    "warnings", "error",
)


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_bit_file(path, bits: BitSequence, cfg: GeneratorConfig | None = None) -> None:
    """Write packed bits plus the JSON sidecar describing their origin."""
    path = Path(path)
    path.write_bytes(bits.packed.tobytes())
    doc = {"format": BIT_FORMAT, "num_bits": len(bits)}
    if cfg is not None:
        doc["seed"] = cfg.seed
        doc["burn_in_bits"] = cfg.burn_in_bits
        doc["params"] = json.loads(cfg.params.to_json())
    sidecar_path(path).write_text(json.dumps(doc, indent=2) + "\n",
                                  encoding="utf-8")


def read_bit_file(path) -> tuple[BitSequence, dict]:
    """Read a packed bit file; the sidecar supplies the exact bit count."""
    path = Path(path)
    doc = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    if doc.get("format") != BIT_FORMAT:
        raise ValueError(f"{path}: unknown bit-file format {doc.get('format')!r}")
    packed = np.fromfile(path, dtype=np.uint8)
    return BitSequence(packed, int(doc["num_bits"])), doc


def load_params(path) -> GbarParams:
    return GbarParams.from_json(Path(path).read_text(encoding="utf-8"))


def config_hash(doc: dict) -> str:
    """Stable 12-hex-digit digest of a JSON-serializable config."""
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return str(int(value))
    return str(value)


def make_row(**fields) -> dict[str, str]:
    """Normalize one experiment row to the fixed column set."""
    unknown = set(fields) - set(EXPERIMENT_COLUMNS)
    if unknown:
        raise KeyError(f"unknown CSV fields: {sorted(unknown)}")
    return {col: _fmt(fields.get(col)) for col in EXPERIMENT_COLUMNS}


def report_fields(report: EntropyReport) -> dict:
    return {
        "n": report.n,
        "target_bits": report.n + 1,
        "method": report.method,
        "h_min": report.h_min,
        "h_avg": report.h_avg,
        "h_worst": report.h_worst,
        "h_avg_total": report.h_avg_total,
        "h_limit": report.h_limit,
        "limit_exact": report.limit_exact,
        "num_samples": report.num_samples,
        "sample_bits": report.sample_bits,
        "warnings": ";".join(report.warnings),
    }


def estimate_fields(est: PredictorEstimate) -> dict:
    return {
        "predictor": est.name,
        "strategy": est.strategy,
        "target_bits": est.target_bits,
        "n": est.target_bits - 1,
        "p_acc": est.p_acc,
        "n_evals": est.n_evals,
        "h_per_bit": est.h_per_bit,
        "ci_delta": est.ci_delta,
        "h_global": est.h_global,
        "h_local": est.h_local,
        "h_final": est.h_final,
        "unseen_contexts": est.unseen_contexts,
    }


def write_rows(path, rows) -> None:
    """RFC 4180 CSV with the fixed experiment schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=EXPERIMENT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def read_rows(path) -> list[dict]:
    with Path(path).open("r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))
