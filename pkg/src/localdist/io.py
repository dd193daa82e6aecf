"""JSON documents for POVMs, outcome statistics, states and reports.

Floats are written with 17 significant digits by a small deterministic
writer, so ``save(load(path))`` reproduces a file produced by ``save`` byte
for byte.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .povm import Povm


class FormatError(ValueError):
    """A document does not match the expected JSON layout."""


# --- deterministic writer ----------------------------------------------------


def _number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    # adding 0.0 folds -0.0 into 0.0 so the text is stable across round trips
    return "%.17g" % (x + 0.0)


def _is_flat(obj) -> bool:
    return all(not isinstance(v, (list, tuple, dict)) for v in obj)


def _is_row_list(obj) -> bool:
    # a matrix row: list of [re, im] pairs or plain numbers
    return all(
        isinstance(v, (list, tuple)) and _is_flat(v) for v in obj
    ) or _is_flat(obj)


def _dump(obj, level: int) -> str:
    pad = "  " * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_dump(v, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if _is_row_list(obj):
            return "[" + ", ".join(_dump(v, level + 1) for v in obj) + "]"
        items = [f"{pad}  {_dump(v, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_number(obj.real)}, {_number(obj.imag)}]"
    return _number(obj)


def dumps(obj) -> str:
    """Serialize plain data (dicts, lists, numbers, strings) deterministically."""
    return _dump(obj, 0) + "\n"


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def read_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: top level must be an object")
    return doc


# --- complex matrices --------------------------------------------------------


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(data, d: int | None = None, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: entries must be [re, im] number pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise FormatError(f"{what}: expected a square row-major array of [re, im] pairs, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise FormatError(f"{what}: expected dimension {d}, got {arr.shape[0]}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


# --- POVM documents ------------------------------------------------------------


def povm_to_dict(povm: Povm) -> dict:
    doc = {
        "dim": povm.dim,
        "effects": [encode_matrix(e) for e in povm.effects],
        "labels": list(povm.labels),
    }
    if povm.metadata:
        doc["metadata"] = povm.metadata
    return doc


def povm_from_dict(doc: dict) -> Povm:
    for key in ("dim", "effects"):
        if key not in doc:
            raise FormatError(f"POVM document is missing {key!r}")
    d = doc["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise FormatError("'dim' must be a positive integer")
    effects = doc["effects"]
    if not isinstance(effects, list) or not effects:
        raise FormatError("'effects' must be a non-empty list")
    mats = np.array([decode_matrix(e, d, f"effect {i}") for i, e in enumerate(effects)])
    labels = doc.get("labels") or []
    if not isinstance(labels, list):
        raise FormatError("'labels' must be a list of strings")
    metadata = doc.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise FormatError("'metadata' must be an object")
    try:
        return Povm(mats, tuple(labels), dict(metadata))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def save_povm(povm: Povm, path) -> None:
    write_text(path, dumps(povm_to_dict(povm)))


def load_povm(path) -> Povm:
    return povm_from_dict(read_json(path))


# --- statistics and states -----------------------------------------------------


def stats_to_dict(probabilities, povm_ref: str = "") -> dict:
    return {"povm_ref": str(povm_ref), "probabilities": [float(p) for p in probabilities]}


def load_stats(path) -> tuple[np.ndarray, str]:
    doc = read_json(path)
    if "probabilities" not in doc:
        raise FormatError("statistics document is missing 'probabilities'")
    try:
        p = np.asarray(doc["probabilities"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError("'probabilities' must be a list of numbers") from exc
    if p.ndim != 1:
        raise FormatError("'probabilities' must be a flat list")
    return p, str(doc.get("povm_ref", ""))


def save_stats(probabilities, path, povm_ref: str = "") -> None:
    write_text(path, dumps(stats_to_dict(probabilities, povm_ref)))


def state_to_dict(rho, **diagnostics) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"dim": rho.shape[0], "state": encode_matrix(rho), **diagnostics}


def load_state(path) -> np.ndarray:
    """Density matrix from a state document, or from a ``"vector"`` entry."""
    doc = read_json(path)
    if "state" in doc:
        return decode_matrix(doc["state"], doc.get("dim"), "state")
    if "vector" in doc:
        try:
            arr = np.asarray(doc["vector"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise FormatError("'vector' must be a list of [re, im] pairs") from exc
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise FormatError("'vector' must be a list of [re, im] pairs")
        psi = arr[:, 0] + 1j * arr[:, 1]
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise FormatError("'vector' is zero")
        psi = psi / norm
        return np.outer(psi, psi.conj())
    raise FormatError("state document needs 'state' or 'vector'")
