"""JSON and CSV formats.

``qlti.matfn/1`` stores one flattened row-major matrix per frequency as
separate real and imaginary lists; ``qlti.circuit/1`` stores the seven factors
of an optical circuit; ``qlti.noise/1`` stores a quantized model with its
per-frequency noise-mode counts; ``qlti.transfer/1`` describes a transfer
function to be sampled. JSON floats are written with Python's shortest
round-trip repr, CSV values with 17 significant digits.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import jsonschema
import numpy as np

from .core import FrequencyGrid, MatrixFunction, QltiError
from .decompose import MeshProgram, OpticalCircuit
from .quantize import Dilation, NoiseModel
from .sdm import SpectralDensityMatrix

__all__ = [
    "SchemaError",
    "matfn_to_doc",
    "doc_to_matfn",
    "circuit_to_doc",
    "doc_to_circuit",
    "noise_to_doc",
    "doc_to_noise",
    "dilation_to_doc",
    "doc_to_dilation",
    "load_json",
    "dump_json",
    "write_csv",
    "read_csv",
    "CSV_VERSION",
]

CSV_VERSION = "qlti-csv/1"


class SchemaError(QltiError, ValueError):
    """A document does not match its declared schema."""


_NUMS = {"type": "array", "items": {"type": "number"}}
_NUM_ROWS = {"type": "array", "items": _NUMS}

MATFN_SCHEMA = {
    "type": "object",
    "required": ["schema", "rows", "cols", "frequencies", "re", "im"],
    "properties": {
        "schema": {"const": "qlti.matfn/1"},
        "kind": {"type": "string"},
        "n_modes": {"type": "integer", "minimum": 0},
        "rows": {"type": "integer", "minimum": 0},
        "cols": {"type": "integer", "minimum": 0},
        "ordering": {"const": "qqpp"},
        "frequencies": {**_NUMS, "minItems": 1},
        "re": _NUM_ROWS,
        "im": _NUM_ROWS,
    },
}

_CMAT = {
    "type": "object",
    "required": ["re", "im"],
    "properties": {"re": _NUM_ROWS, "im": _NUM_ROWS},
}

CIRCUIT_SCHEMA = {
    "type": "object",
    "required": ["schema", "n_modes", "frequencies", "factors"],
    "properties": {
        "schema": {"const": "qlti.circuit/1"},
        "n_modes": {"type": "integer", "minimum": 1},
        "frequencies": {**_NUMS, "minItems": 1},
        "factors": {
            "type": "object",
            "required": ["V1", "theta1", "W1", "r", "W2", "theta2", "V2"],
            "properties": {
                "V1": _CMAT, "W1": _CMAT, "W2": _CMAT, "V2": _CMAT,
                "theta1": _NUM_ROWS, "theta2": _NUM_ROWS, "r": _NUM_ROWS,
            },
        },
        "failures": {"type": "object"},
        "meshes": {"type": "array"},
        "source": {"type": "object"},
    },
}

NOISE_SCHEMA = {
    "type": "object",
    "required": ["schema", "model", "per_freq"],
    "properties": {
        "schema": {"const": "qlti.noise/1"},
        "model": {"type": "object", "required": ["G", "N"]},
        "per_freq": {"type": "array"},
    },
}

TRANSFER_SCHEMA = {
    "type": "object",
    "required": ["schema"],
    "properties": {"schema": {"const": "qlti.transfer/1"}},
    "oneOf": [{"required": ["entries"]}, {"required": ["preset"]}],
}

SCHEMAS = {
    "qlti.matfn/1": MATFN_SCHEMA,
    "qlti.circuit/1": CIRCUIT_SCHEMA,
    "qlti.noise/1": NOISE_SCHEMA,
    "qlti.transfer/1": TRANSFER_SCHEMA,
}


def validate(doc: dict, expected: str | None = None) -> str:
    """Check ``doc`` against its schema and return the schema name."""
    if not isinstance(doc, dict) or "schema" not in doc:
        raise SchemaError("document has no 'schema' field")
    name = doc["schema"]
    if expected is not None and name != expected:
        raise SchemaError(f"expected a {expected} document, got {name!r}")
    if name not in SCHEMAS:
        raise SchemaError(f"unknown schema {name!r}")
    try:
        jsonschema.validate(doc, SCHEMAS[name])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaError(f"{name}: {exc.message} at '{path}'") from None
    return name


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def dump_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=1, allow_nan=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------------------
# matrix functions


def _flat(samples: np.ndarray):
    flat = np.asarray(samples).reshape(samples.shape[0], -1)
    return flat.real.tolist(), flat.imag.tolist()


def matfn_to_doc(F, kind: str | None = None) -> dict:
    """``qlti.matfn/1`` document for a MatrixFunction or SpectralDensityMatrix."""
    if isinstance(F, SpectralDensityMatrix):
        samples, kind = F.samples, "sdm"
    else:
        samples, kind = F.samples, kind or F.kind
    rows, cols = samples.shape[1:]
    re, im = _flat(samples)
    return {
        "schema": "qlti.matfn/1",
        "kind": kind,
        "n_modes": rows // 2,
        "rows": rows,
        "cols": cols,
        "ordering": "qqpp",
        "frequencies": F.grid.omega.tolist(),
        "re": re,
        "im": im,
    }


def _samples(doc: dict) -> tuple[FrequencyGrid, np.ndarray]:
    validate(doc, "qlti.matfn/1")
    rows, cols = doc["rows"], doc["cols"]
    re, im = np.asarray(doc["re"], dtype=float), np.asarray(doc["im"], dtype=float)
    K = len(doc["frequencies"])
    if re.shape != (K, rows * cols) or im.shape != (K, rows * cols):
        raise SchemaError(f"qlti.matfn/1: expected {K} rows of {rows * cols} values")
    try:
        grid = FrequencyGrid(np.asarray(doc["frequencies"], dtype=float))
    except ValueError as exc:
        raise SchemaError(f"qlti.matfn/1: {exc}") from None
    return grid, (re + 1j * im).reshape(K, rows, cols)


def doc_to_matfn(doc: dict):
    """Inverse of :func:`matfn_to_doc`; ``kind == "sdm"`` gives a SpectralDensityMatrix."""
    grid, samples = _samples(doc)
    try:
        if doc.get("kind") == "sdm":
            return SpectralDensityMatrix(grid, samples)
        return MatrixFunction(grid, samples, doc.get("kind", "matrix"))
    except ValueError as exc:
        raise SchemaError(f"qlti.matfn/1: {exc}") from None


def dilation_to_doc(dil: Dilation) -> dict:
    doc = matfn_to_doc(dil.M_ext, "dilation")
    doc["blocks"] = {"m": dil.m, "n": dil.n, "n_noise": dil.n_noise, "n_anc": dil.n_anc}
    return doc


def doc_to_dilation(doc: dict) -> Dilation:
    F = doc_to_matfn(doc)
    b = doc.get("blocks")
    if not b:
        raise SchemaError("dilation document lacks 'blocks'")
    return Dilation(F, int(b["m"]), int(b["n"]), int(b["n_noise"]), int(b["n_anc"]))


# ---------------------------------------------------------------------------
# noise models


def noise_to_doc(model: NoiseModel) -> dict:
    per = []
    for k in range(len(model.grid)):
        per.append(
            {
                "ell": int(model.ell[k]),
                "d_plus": int(model.d_plus[k]),
                "d_minus": int(model.d_minus[k]),
                "gamma": np.asarray(model.gamma[k]).tolist(),
            }
        )
    return {
        "schema": "qlti.noise/1",
        "model": {"G": matfn_to_doc(model.G), "N": matfn_to_doc(model.N, "noise")},
        "per_freq": per,
    }


def doc_to_noise(doc: dict) -> NoiseModel:
    validate(doc, "qlti.noise/1")
    G, N = doc_to_matfn(doc["model"]["G"]), doc_to_matfn(doc["model"]["N"])
    per = doc["per_freq"]
    if len(per) != len(G.grid):
        raise SchemaError("qlti.noise/1: one per_freq entry per frequency is required")
    gam = [np.asarray(p["gamma"], dtype=float) for p in per]
    return NoiseModel(
        G,
        N,
        np.array([p["ell"] for p in per]),
        gam,
        np.array([p["d_plus"] for p in per]),
        np.array([p["d_minus"] for p in per]),
        [np.concatenate([g[: p["d_plus"]] ** 2, -g[p["d_plus"] :] ** 2]) for g, p in zip(gam, per)],
    )


# ---------------------------------------------------------------------------
# circuits


def _cm(arr: np.ndarray) -> dict:
    flat = arr.reshape(arr.shape[0], -1)
    return {"re": flat.real.tolist(), "im": flat.imag.tolist()}


def _from_cm(d: dict, K: int, n: int) -> np.ndarray:
    re, im = np.asarray(d["re"], dtype=float), np.asarray(d["im"], dtype=float)
    if re.shape != (K, n * n) or im.shape != (K, n * n):
        raise SchemaError(f"qlti.circuit/1: factor must hold {K} rows of {n * n} values")
    return (re + 1j * im).reshape(K, n, n)


def circuit_to_doc(circ: OpticalCircuit, meshes=None, source: MatrixFunction | None = None) -> dict:
    doc = {
        "schema": "qlti.circuit/1",
        "n_modes": circ.n_modes,
        "frequencies": circ.grid.omega.tolist(),
        "factors": {
            "V1": _cm(circ.V1),
            "theta1": circ.theta1.tolist(),
            "W1": _cm(circ.W1),
            "r": circ.r.tolist(),
            "W2": _cm(circ.W2),
            "theta2": circ.theta2.tolist(),
            "V2": _cm(circ.V2),
        },
        "failures": {str(k): v for k, v in circ.failures.items()},
    }
    if meshes is not None:
        doc["meshes"] = [{name: prog.to_dict() for name, prog in m.items()} for m in meshes]
    if source is not None:
        doc["source"] = matfn_to_doc(source)
    return doc


def doc_to_circuit(doc: dict) -> OpticalCircuit:
    validate(doc, "qlti.circuit/1")
    n, K = doc["n_modes"], len(doc["frequencies"])
    f = doc["factors"]
    vecs = {}
    for key in ("theta1", "r", "theta2"):
        arr = np.asarray(f[key], dtype=float)
        if arr.shape != (K, n):
            raise SchemaError(f"qlti.circuit/1: {key} must be {K} x {n}")
        vecs[key] = arr
    return OpticalCircuit(
        FrequencyGrid(np.asarray(doc["frequencies"], dtype=float)),
        _from_cm(f["V1"], K, n),
        vecs["theta1"],
        _from_cm(f["W1"], K, n),
        vecs["r"],
        _from_cm(f["W2"], K, n),
        vecs["theta2"],
        _from_cm(f["V2"], K, n),
        failures={int(k): v for k, v in doc.get("failures", {}).items()},
    )


def doc_to_meshes(doc: dict) -> list[dict]:
    return [{k: MeshProgram.from_dict(v) for k, v in m.items()} for m in doc.get("meshes", [])]


# ---------------------------------------------------------------------------
# CSV


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(table: str, columns: list[str], rows, path=None, meta: dict | None = None) -> str:
    """CSV with ``# qlti-csv/1 <table>`` and optional ``# key=value`` header lines."""
    buf = _io.StringIO()
    buf.write(f"# {CSV_VERSION} {table}\n")
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def read_csv(text: str) -> tuple[str, dict, list[str], np.ndarray]:
    """Parse :func:`write_csv` output into ``(table, meta, columns, values)``."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {CSV_VERSION} "):
        raise SchemaError("missing qlti-csv/1 header")
    table = lines[0].split(" ", 2)[2]
    meta, i = {}, 1
    while i < len(lines) and lines[i].startswith("#"):
        k, _, v = lines[i][2:].partition("=")
        meta[k] = v
        i += 1
    reader = list(csv.reader(lines[i:]))
    cols = reader[0]
    vals = np.array([[float(x) for x in r] for r in reader[1:]]) if len(reader) > 1 else np.zeros((0, len(cols)))
    return table, meta, cols, vals
