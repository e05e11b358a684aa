"""Pure-numpy implementations of the hot counting kernels.

These are the fallback when the compiled extension is unavailable.  Both
backends produce bit-identical results (all accumulations are integer
valued), so switching backends never changes any output.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 4096


def cross_counts(edge_verts: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Cross-cluster edge counts for a batch of labelings.

    edge_verts: (m, h) int64 vertex indices per edge.
    labels: (L, n) int8 matrix of +/-1 labelings.
    Returns (L,) int64: per labeling, the number of edges whose vertices
    do not all carry one label.
    """
    m = edge_verts.shape[0]
    L = labels.shape[0]
    out = np.empty(L, dtype=np.int64)
    if m == 0:
        out[:] = 0
        return out
    for start in range(0, L, _CHUNK):
        block = labels[start : start + _CHUNK]
        lab = block[:, edge_verts]  # (B, m, h)
        mono = (lab == lab[:, :, :1]).all(axis=2)
        out[start : start + _CHUNK] = m - mono.sum(axis=1)
    return out


def expansion_weights(edge_verts: np.ndarray, n: int) -> np.ndarray:
    """Clique-expansion co-occurrence matrix W[i, j] = #edges containing
    both i and j (zero diagonal)."""
    W = np.zeros((n, n), dtype=np.float64)
    h = edge_verts.shape[1] if edge_verts.ndim == 2 else 0
    for i in range(h):
        for j in range(i + 1, h):
            np.add.at(W, (edge_verts[:, i], edge_verts[:, j]), 1.0)
            np.add.at(W, (edge_verts[:, j], edge_verts[:, i]), 1.0)
    return W
