"""JSON fixtures for states, maskers and result records.

Complex arrays are stored row-major as lists of ``[re, im]`` pairs next to
an explicit shape or dims header.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import DimensionError
from .masking import Masker, ProbabilisticMasker, UnitaryMasker
from .states import BipartitePureState

STATE_SCHEMA = "qmask.state/1"
MASKER_SCHEMA = "qmask.masker/1"


def complex_to_pairs(a) -> list[list[float]]:
    flat = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_complex(pairs, shape=None) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DimensionError("expected a list of [re, im] pairs")
    out = arr[:, 0] + 1j * arr[:, 1]
    return out if shape is None else out.reshape(shape)


def state_to_dict(psi: BipartitePureState) -> dict:
    return {"schema": STATE_SCHEMA, "dims": [psi.dim_a, psi.dim_b], "amplitudes": complex_to_pairs(psi.amplitudes)}


def state_from_dict(d: dict) -> BipartitePureState:
    r, s = d["dims"]
    return BipartitePureState(pairs_to_complex(d["amplitudes"]), int(r), int(s))


def masker_to_dict(m: Masker) -> dict:
    if isinstance(m, UnitaryMasker):
        return {
            "schema": MASKER_SCHEMA,
            "kind": "unitary",
            "dims": [m.dim_a, m.dim_b],
            "shape": list(m.unitary.shape),
            "entries": complex_to_pairs(m.unitary),
            "ancilla": complex_to_pairs(m.ancilla),
        }
    if isinstance(m, ProbabilisticMasker):
        return {
            "schema": MASKER_SCHEMA,
            "kind": "probabilistic",
            "dims": [m.dim_a, m.dim_b],
            "shape": list(m.linear_map.shape),
            "entries": complex_to_pairs(m.linear_map),
        }
    raise TypeError(f"not a masker: {type(m).__name__}")


def masker_from_dict(d: dict) -> Masker:
    r, s = (int(x) for x in d["dims"])
    entries = pairs_to_complex(d["entries"], tuple(d["shape"]))
    if d["kind"] == "unitary":
        return UnitaryMasker(entries, pairs_to_complex(d["ancilla"]), r, s)
    if d["kind"] == "probabilistic":
        return ProbabilisticMasker(entries, r, s)
    raise ValueError(f"unknown masker kind {d['kind']!r}")


def _clean(obj):
    # JSON has no inf/nan; numpy scalars and tuples need plain types
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())
