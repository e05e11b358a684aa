"""Combinatorial substrate: exact binomials, h-subset ranking, hypergraph
container, labelings, and cross-cluster counting.

Vertices are 0-indexed.  Every h-subset of {0, ..., n-1} is identified with
its colexicographic rank in [0, C(n, h)); ranks are what the edge set
stores.  The JSON wire format serializes vertex tuples (sorted ascending,
edges in lexicographic order) so files stay readable and rank-convention
independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient; 0 when k > n.

    Uses arbitrary-precision integers, so there is no overflow for any
    practical n (wide-integer arithmetic; never wraps silently).
    """
    if n < 0 or k < 0:
        raise ValidationError(f"binom requires nonnegative arguments, got ({n}, {k})")
    return math.comb(n, k)


def rank_subset(vertices: Sequence[int], n: int) -> int:
    """Colexicographic rank of a sorted vertex tuple among all h-subsets.

    rank((v0 < v1 < ... < v_{h-1})) = sum_i C(v_i, i+1).  The empty tuple
    is rejected (h >= 1 required; hypergraphs use h >= 2).
    """
    h = len(vertices)
    if h == 0:
        raise ValidationError("empty vertex tuple")
    prev = -1
    r = 0
    for i, v in enumerate(vertices):
        if not 0 <= v < n:
            raise ValidationError(f"vertex {v} out of range [0, {n})")
        if v <= prev:
            raise ValidationError(f"vertices must be strictly increasing, got {tuple(vertices)}")
        prev = v
        r += math.comb(v, i + 1)
    return r


def unrank_subset(rank: int, n: int, h: int) -> tuple[int, ...]:
    """Inverse of rank_subset: colex rank -> sorted h-tuple."""
    if h < 1 or n < h:
        raise ValidationError(f"need n >= h >= 1, got n={n}, h={h}")
    if not 0 <= rank < math.comb(n, h):
        raise ValidationError(f"rank {rank} out of range [0, C({n},{h}))")
    out = []
    r = rank
    v = n - 1
    for i in range(h, 0, -1):
        while math.comb(v, i) > r:
            v -= 1
        out.append(v)
        r -= math.comb(v, i)
        v -= 1
    out.reverse()
    return tuple(out)


@lru_cache(maxsize=256)
def _comb_column(n: int, i: int) -> np.ndarray:
    """int64 array of C(v, i) for v = 0..n-1.  Only valid while the
    entries fit in 63 bits; callers guard via _vector_rank_ok."""
    return np.array([math.comb(v, i) for v in range(n)], dtype=np.int64)


@lru_cache(maxsize=256)
def _vector_rank_ok(n: int, h: int) -> bool:
    return math.comb(n, h) < (1 << 62)


def unrank_array(ranks: np.ndarray, n: int, h: int) -> np.ndarray:
    """Vectorized unrank: (m,) colex ranks -> (m, h) sorted vertex rows."""
    if not _vector_rank_ok(n, h):
        return np.array([unrank_subset(int(r), n, h) for r in ranks], dtype=np.int64)
    r = np.asarray(ranks, dtype=np.int64).copy()
    out = np.empty((r.size, h), dtype=np.int64)
    for i in range(h, 0, -1):
        col = _comb_column(n, i)
        v = np.searchsorted(col, r, side="right") - 1
        out[:, i - 1] = v
        r -= col[v]
    return out


def rank_array(verts: np.ndarray, n: int) -> np.ndarray:
    """Vectorized rank of (m, h) sorted vertex rows."""
    m, h = verts.shape
    if not _vector_rank_ok(n, h):
        return np.array([rank_subset(tuple(row), n) for row in verts], dtype=np.int64)
    out = np.zeros(m, dtype=np.int64)
    for i in range(h):
        out += _comb_column(n, i + 1)[verts[:, i]]
    return out


@dataclass(frozen=True)
class Labeling:
    """A +/-1 community assignment of length n.

    Stored as a tuple so instances are hashable and immutable; `.array`
    gives an int8 numpy view for numeric code.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValidationError("empty labeling")
        if any(v not in (-1, 1) for v in self.labels):
            raise ValidationError("labels must be +1 or -1")

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "Labeling":
        return cls(tuple(int(v) for v in values))

    @classmethod
    def from_plus_side(cls, n: int, plus: Iterable[int]) -> "Labeling":
        plus_set = set(plus)
        return cls(tuple(1 if i in plus_set else -1 for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int8)

    @property
    def balanced(self) -> bool:
        return sum(1 for v in self.labels if v == 1) * 2 == self.n

    def flipped(self) -> "Labeling":
        return Labeling(tuple(-v for v in self.labels))

    def canonical(self) -> "Labeling":
        """Representative of {sigma, -sigma} with vertex 0 labeled +1."""
        return self if self.labels[0] == 1 else self.flipped()

    def to_json_dict(self) -> dict:
        return {"labels": list(self.labels)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Labeling":
        return cls.from_iterable(obj["labels"])


@dataclass(frozen=True)
class Hypergraph:
    """h-uniform hypergraph on n vertices; edges held as a frozenset of
    colex ranks.  Instances are immutable, so sharing across concurrent
    trials is safe; edits produce new instances."""

    n: int
    h: int
    edges: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.h < 2:
            raise ValidationError(f"uniformity h must be >= 2, got {self.h}")
        if self.n < self.h:
            raise ValidationError(f"need n >= h, got n={self.n}, h={self.h}")
        total = math.comb(self.n, self.h)
        for r in self.edges:
            if not 0 <= r < total:
                raise ValidationError(f"edge rank {r} out of range [0, {total})")

    @classmethod
    def from_vertex_sets(cls, n: int, h: int, edges: Iterable[Sequence[int]]) -> "Hypergraph":
        ranks = []
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != h or len(set(t)) != h:
                raise ValidationError(f"edge {tuple(e)} is not an {h}-subset")
            ranks.append(rank_subset(t, n))
        return cls(n, h, frozenset(ranks))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def total_subsets(self) -> int:
        return math.comb(self.n, self.h)

    def edge_tuples(self) -> list[tuple[int, ...]]:
        """Edges as sorted vertex tuples, in lexicographic order."""
        return [tuple(int(v) for v in row) for row in self.edge_vertex_array()]

    def edge_vertex_array(self) -> np.ndarray:
        """(m, h) int64 array of edge vertices in lexicographic tuple order.

        Computed once per instance (edges are immutable) and cached.
        """
        cached = getattr(self, "_ev_cache", None)
        if cached is not None:
            return cached
        if not self.edges:
            arr = np.empty((0, self.h), dtype=np.int64)
        else:
            ranks = np.fromiter(self.edges, dtype=np.int64, count=len(self.edges))
            arr = unrank_array(ranks, self.n, self.h)
            arr = arr[np.lexsort(arr.T[::-1])]
        arr.setflags(write=False)
        object.__setattr__(self, "_ev_cache", arr)
        return arr

    def with_edge_toggled(self, rank: int) -> "Hypergraph":
        if not 0 <= rank < self.total_subsets:
            raise ValidationError(f"rank {rank} out of range")
        if rank in self.edges:
            return Hypergraph(self.n, self.h, self.edges - {rank})
        return Hypergraph(self.n, self.h, self.edges | {rank})

    def to_json_str(self) -> str:
        obj = {"n": self.n, "h": self.h, "edges": [list(t) for t in self.edge_tuples()]}
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json_str(cls, text: str) -> "Hypergraph":
        obj = json.loads(text)
        try:
            n, h, edges = obj["n"], obj["h"], obj["edges"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed hypergraph JSON: {exc}") from exc
        return cls.from_vertex_sets(n, h, edges)


def monochromatic_capacity(n_plus: int, n_minus: int, h: int) -> int:
    """Number of h-subsets lying entirely inside one side of a split."""
    return binom(n_plus, h) + binom(n_minus, h)


def is_monochromatic(vertices: Sequence[int], labels: Sequence[int]) -> bool:
    first = labels[vertices[0]]
    return all(labels[v] == first for v in vertices[1:])


def count_cross_cluster(H: Hypergraph, sigma: Labeling) -> int:
    """Number of edges whose vertices do not all share one label."""
    if sigma.n != H.n:
        raise ValidationError(f"labeling length {sigma.n} != vertex count {H.n}")
    if not H.edges:
        return 0
    from . import kernels

    counts = kernels.cross_counts(H.edge_vertex_array(), sigma.array[None, :])
    return int(counts[0])


def symmetric_difference_size(H: Hypergraph, H2: Hypergraph) -> int:
    if (H.n, H.h) != (H2.n, H2.h):
        raise ValidationError(
            f"shape mismatch: ({H.n},{H.h}) vs ({H2.n},{H2.h})"
        )
    return len(H.edges ^ H2.edges)


@lru_cache(maxsize=32)
def balanced_canonical_labelings(n: int) -> np.ndarray:
    """All balanced labelings with vertex 0 on the +1 side, as an
    (C(n-1, n/2-1), n) int8 matrix.

    Row order is lexicographic on the label vector with +1 sorting before
    -1; ties everywhere in the package break toward the smallest row
    index, i.e. the lexicographically smallest labeling.
    """
    if n % 2:
        raise ValidationError(f"balanced labelings need even n, got {n}")
    rest = n // 2 - 1
    rows = []
    for plus_rest in combinations(range(1, n), rest):
        row = np.full(n, -1, dtype=np.int8)
        row[0] = 1
        row[list(plus_rest)] = 1
        rows.append(row)
    return np.vstack(rows) if rows else np.empty((0, n), dtype=np.int8)


@lru_cache(maxsize=32)
def all_canonical_labelings(n: int) -> np.ndarray:
    """All 2^(n-1) labelings with vertex 0 labeled +1, lexicographic order
    (+1 before -1)."""
    count = 1 << (n - 1)
    out = np.empty((count, n), dtype=np.int8)
    out[:, 0] = 1
    for j in range(1, n):
        bit = (np.arange(count) >> (n - 1 - j)) & 1
        out[:, j] = np.where(bit == 1, -1, 1).astype(np.int8)
    return out


def canonical_labelings(n: int, label_space: str) -> np.ndarray:
    if label_space == "balanced":
        return balanced_canonical_labelings(n)
    if label_space == "all":
        return all_canonical_labelings(n)
    raise ValidationError(f"unknown label space {label_space!r}")
