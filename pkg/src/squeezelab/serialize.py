"""JSON wire format for matrices: {rows, cols, data, ordering}, row-major doubles."""
from __future__ import annotations

import numpy as np

ORDERINGS = ("interleaved", "grouped")


def matrix_to_json(m, ordering: str = "interleaved") -> dict:
    """Encode a matrix as a JSON-ready dict with an explicit quadrature ordering tag."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got ndim {m.ndim}")
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}, got {ordering!r}")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(v) for v in row] for row in m],
        "ordering": ordering,
    }


def matrix_from_json(doc: dict) -> tuple[np.ndarray, str]:
    """Decode a matrix dict produced by matrix_to_json; returns (matrix, ordering)."""
    for key in ("rows", "cols", "data", "ordering"):
        if key not in doc:
            raise ValueError(f"matrix document missing field {key!r}")
    if doc["ordering"] not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}, got {doc['ordering']!r}")
    m = np.asarray(doc["data"], dtype=float)
    if m.ndim != 2 or m.shape != (doc["rows"], doc["cols"]):
        raise ValueError(f"data shape {m.shape} does not match declared ({doc['rows']}, {doc['cols']})")
    return m, doc["ordering"]
