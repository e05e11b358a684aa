"""Kernel backend selection.

Imports the compiled extension when present, otherwise the pure-numpy
fallback.  Set HYPERDP_NO_EXT=1 to force the fallback (used by the
benchmark and by tests that compare the two backends).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("HYPERDP_NO_EXT") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def cross_counts(edge_verts: np.ndarray, labels: np.ndarray) -> np.ndarray:
    edge_verts = np.ascontiguousarray(edge_verts, dtype=np.int64)
    labels = np.ascontiguousarray(labels, dtype=np.int8)
    if labels.ndim != 2 or edge_verts.ndim != 2:
        raise ValueError("cross_counts expects 2-D arrays")
    return _impl.cross_counts(edge_verts, labels)


def expansion_weights(edge_verts: np.ndarray, n: int) -> np.ndarray:
    edge_verts = np.ascontiguousarray(edge_verts, dtype=np.int64)
    return _impl.expansion_weights(edge_verts, int(n))
