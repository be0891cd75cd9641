"""JSON formats shared by the CLI and the test suite.

Matrix format: {"dims": [dX, dY], "re": [[...]], "im": [[...]]}, row-major,
basis |00>, |01>, ... with the trusted index fastest. Complex scalars are
serialized as [re, im] pairs everywhere.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import DensityMatrix

__all__ = [
    "matrix_to_doc",
    "matrix_from_doc",
    "vector_to_doc",
    "vector_from_doc",
    "complex_pair",
    "canonical_json",
    "load_state",
    "save_state",
]


def complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_doc(rho: DensityMatrix) -> dict:
    return {
        "dims": [rho.dims[0], rho.dims[1]],
        "re": rho.mat.real.tolist(),
        "im": rho.mat.imag.tolist(),
    }


def matrix_from_doc(doc: dict) -> DensityMatrix:
    if not isinstance(doc, dict):
        raise ValueError("matrix document must be a JSON object")
    for key in ("dims", "re", "im"):
        if key not in doc:
            raise ValueError(f"matrix document is missing {key!r}")
    dims = doc["dims"]
    if not (isinstance(dims, list) and len(dims) == 2):
        raise ValueError("dims must be a two-element list")
    mat = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    return DensityMatrix(mat, (int(dims[0]), int(dims[1])))


def vector_to_doc(v: np.ndarray) -> dict:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def vector_from_doc(doc: dict) -> np.ndarray:
    if not isinstance(doc, dict) or "re" not in doc or "im" not in doc:
        raise ValueError("vector document needs 're' and 'im' lists")
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float)
    if re.shape != im.shape or re.ndim != 1:
        raise ValueError("vector re/im must be flat lists of equal length")
    return re + 1j * im


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def load_state(path: str | Path) -> DensityMatrix:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON in {path}: {exc}") from exc
    return matrix_from_doc(doc)


def save_state(rho: DensityMatrix, path: str | Path) -> None:
    Path(path).write_text(canonical_json(matrix_to_doc(rho)), encoding="utf-8")
