"""Exhaustive desk-scale machinery: every hypergraph on (n, h) as a bit
mask over the C(n, h) potential edges, with vectorized ML winners and
exact instability distances.

This is what makes exact privacy audits and the exact distance mode of
the stability mechanism tractable: one table build per (params, label
space) answers every query over the whole instance family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypergraph import (
    Hypergraph,
    Labeling,
    ValidationError,
    binom,
    canonical_labelings,
    monochromatic_capacity,
    unrank_subset,
)
from .model import ModelParams

# 2^20 masks (about 1M) is the largest family we materialize.
FAMILY_BITS_CAP = 20

_UNREACHABLE = np.iinfo(np.int32).max


def _loglik_matrix(total: int, num_edges, psi, n_in, params: ModelParams):
    """Shared log-likelihood expression; broadcasting-friendly so the
    per-instance and whole-family paths produce identical floats."""
    lp, l1p = math.log(params.p), math.log1p(-params.p)
    lq, l1q = math.log(params.q), math.log1p(-params.q)
    e_in = num_edges - psi
    n_cr = total - n_in
    return e_in * lp + (n_in - e_in) * l1p + psi * lq + (n_cr - psi) * l1q


@dataclass
class ExhaustiveFamily:
    n: int
    h: int
    params: ModelParams
    label_space: str
    labels: np.ndarray        # (L, n) int8
    psi: np.ndarray           # (2^C, L) int32 cross-cluster counts
    winner: np.ndarray        # (2^C,) int32 argmax likelihood index (lex tie-break)
    tie: np.ndarray           # (2^C,) bool: maximizer not unique
    strict_distance: np.ndarray  # (2^C,) int32: min edits until the winner changes

    @property
    def num_masks(self) -> int:
        return self.psi.shape[0]

    def mask_of(self, H: Hypergraph) -> int:
        if (H.n, H.h) != (self.n, self.h):
            raise ValidationError("hypergraph shape does not match family")
        m = 0
        for r in H.edges:
            m |= 1 << r
        return m

    def hypergraph_of(self, mask: int) -> Hypergraph:
        edges = frozenset(r for r in range(binom(self.n, self.h)) if mask >> r & 1)
        return Hypergraph(self.n, self.h, edges)

    def winner_labeling(self, mask: int) -> Labeling:
        return Labeling.from_iterable(self.labels[self.winner[mask]])

    def distance(self, mask: int) -> float:
        """Instability distance with the tie convention: 0 when the
        maximizer ties, else the strict output-change distance."""
        if self.tie[mask]:
            return 0.0
        d = self.strict_distance[mask]
        return math.inf if d == _UNREACHABLE else float(d)

    def surrogate_gap(self, mask: int) -> int:
        """Best-vs-second-best cross-count gap measured at the winner."""
        row = self.psi[mask]
        w = self.winner[mask]
        others = np.delete(row, w)
        return int(others.min() - row[w])


def build_family(params: ModelParams, label_space: str) -> ExhaustiveFamily:
    n, h = params.n, params.h
    total = binom(n, h)
    if total > FAMILY_BITS_CAP:
        raise ValidationError(
            f"C({n},{h}) = {total} potential edges exceeds the exhaustive "
            f"cap of {FAMILY_BITS_CAP}"
        )
    if label_space == "balanced" and n % 2:
        raise ValidationError("balanced label space requires even n")
    labels = canonical_labelings(n, label_space)
    L = labels.shape[0]

    cross = np.empty((total, L), dtype=np.float32)
    for r in range(total):
        verts = list(unrank_subset(r, n, h))
        lab = labels[:, verts]
        cross[r] = 1.0 - (lab == lab[:, :1]).all(axis=1)

    num_masks = 1 << total
    idx = np.arange(num_masks, dtype=np.uint32)
    bits = ((idx[:, None] >> np.arange(total)[None, :]) & 1).astype(np.float32)
    psi = np.rint(bits @ cross).astype(np.int32)
    num_edges = bits.sum(axis=1).astype(np.int64)

    plus = (labels == 1).sum(axis=1)
    n_in = np.array(
        [monochromatic_capacity(int(k), n - int(k), h) for k in plus], dtype=np.int64
    )
    loglik = _loglik_matrix(
        total, num_edges[:, None], psi.astype(np.int64), n_in[None, :], params
    )
    winner = np.argmax(loglik, axis=1).astype(np.int32)
    best = loglik[np.arange(num_masks), winner]
    tie = (loglik == best[:, None]).sum(axis=1) > 1

    strict = _strict_distances(winner, total)
    return ExhaustiveFamily(
        n=n,
        h=h,
        params=params,
        label_space=label_space,
        labels=labels,
        psi=psi,
        winner=winner,
        tie=tie,
        strict_distance=strict,
    )


def _strict_distances(winner: np.ndarray, total_bits: int) -> np.ndarray:
    """BFS over the mask hypercube: distance to the nearest mask whose
    winner differs.  Propagation steps only cross same-winner pairs, which
    is sound because any mask adjacent to a differing winner is already a
    level-1 seed."""
    num = winner.size
    idx = np.arange(num, dtype=np.int64)
    dist = np.full(num, -1, dtype=np.int32)
    frontier = np.zeros(num, dtype=bool)
    for j in range(total_bits):
        frontier |= winner[idx ^ (1 << j)] != winner
    dist[frontier] = 1
    level = 1
    while True:
        unassigned = dist == -1
        if not unassigned.any():
            break
        reach = np.zeros(num, dtype=bool)
        for j in range(total_bits):
            reach |= dist[idx ^ (1 << j)] == level
        newly = unassigned & reach
        if not newly.any():
            dist[unassigned] = _UNREACHABLE  # winner constant on the rest
            break
        dist[newly] = level + 1
        level += 1
    return dist


_family_cache: dict[tuple, ExhaustiveFamily] = {}


def family_for(params: ModelParams, label_space: str) -> ExhaustiveFamily:
    key = (params.n, params.h, params.p, params.q, label_space)
    fam = _family_cache.get(key)
    if fam is None:
        if len(_family_cache) > 8:
            _family_cache.clear()
        fam = build_family(params, label_space)
        _family_cache[key] = fam
    return fam
