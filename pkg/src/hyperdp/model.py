"""h-HSBM(n, p, q) parametrization and seeded sampling.

Probabilities derive from density coefficients via the dense-regime rule
p = a*ln(n)/C(n-1, h-1), q = b*ln(n)/C(n-1, h-1).  The logarithm is the
NATURAL log throughout the package; the randomized-response threshold
constants frozen in the test suite (10.6008, 5.8611) reproduce only
under ln, which is why the convention is fixed here and never
configurable.

Randomness: every sampling routine takes an integer seed and runs a fresh
numpy PCG64 generator, so results are pure functions of (inputs, seed).
Stream seeds derive from a master seed with a splitmix64 mix (see
derive_seed), which is stable across platforms and documented in the
README.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .hypergraph import (
    Hypergraph,
    Labeling,
    ValidationError,
    binom,
    is_monochromatic,
    rank_array,
    rank_subset,
    unrank_array,
    unrank_subset,
)

_MASK64 = (1 << 64) - 1
# Largest class size we are willing to materialize when a dense draw needs
# uniform sampling without replacement.
_MATERIALIZE_CAP = 10_000_000


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, *parts: int) -> int:
    """Stable 64-bit mix of a master seed and stream indices.

    Chained splitmix64: the master is mixed first, then each part is
    absorbed in order.  Identical arguments give identical seeds on any
    platform.
    """
    state = _splitmix64(master & _MASK64)
    for p in parts:
        state = _splitmix64((state ^ (p & _MASK64)) & _MASK64)
    return state


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


@dataclass(frozen=True)
class ModelParams:
    """h-HSBM configuration: (n, h, a, b) with derived (p, q)."""

    n: int
    h: int
    a: float
    b: float
    p: float
    q: float

    def __post_init__(self):
        if self.h < 2 or self.n < self.h:
            raise ValidationError(f"need n >= h >= 2, got n={self.n}, h={self.h}")
        if not (self.a >= self.b > 0):
            raise ValidationError(f"need a >= b > 0, got a={self.a}, b={self.b}")
        for name, val in (("p", self.p), ("q", self.q)):
            if not 0.0 <= val <= 1.0:
                raise ValidationError(
                    f"{name}={val:.6g} outside [0, 1]; refusing to clamp "
                    "(clamping would corrupt threshold experiments)"
                )

    @classmethod
    def from_coefficients(cls, n: int, h: int, a: float, b: float) -> "ModelParams":
        if n < 2:
            raise ValidationError(f"need n >= 2, got {n}")
        denom = binom(n - 1, h - 1)
        if denom == 0:
            raise ValidationError(f"C({n - 1},{h - 1}) = 0")
        scale = math.log(n) / denom
        return cls(n=n, h=h, a=a, b=b, p=a * scale, q=b * scale)

    @classmethod
    def from_probabilities(cls, n: int, h: int, p: float, q: float) -> "ModelParams":
        denom = binom(n - 1, h - 1)
        scale = math.log(n) / denom
        return cls(n=n, h=h, a=p / scale, b=q / scale, p=p, q=q)


def sample_ground_truth(n: int, mode: str, seed: int) -> Labeling:
    """Planted labeling: 'uniform_iid' flips a fair coin per vertex;
    'balanced' draws uniformly among vectors with equal side sizes."""
    rng = make_rng(seed)
    if mode == "uniform_iid":
        bits = rng.integers(0, 2, size=n)
        return Labeling.from_iterable(np.where(bits == 1, 1, -1))
    if mode == "balanced":
        if n % 2:
            raise ValidationError(f"balanced mode requires even n, got {n}")
        plus = rng.permutation(n)[: n // 2]
        return Labeling.from_plus_side(n, plus.tolist())
    raise ValidationError(f"unknown ground-truth mode {mode!r}")


def edge_probability(params: ModelParams, sigma: Labeling, vertices) -> float:
    """Inclusion probability of one potential hyperedge under the model."""
    if sigma.n != params.n:
        raise ValidationError("labeling length != n")
    vs = tuple(sorted(vertices))
    if len(vs) != params.h:
        raise ValidationError(f"expected an {params.h}-subset")
    rank_subset(vs, params.n)  # validates range/distinctness
    return params.p if is_monochromatic(vs, sigma.labels) else params.q


def _uniform_distinct(rng: np.random.Generator, draw_batch, count: int, class_size: int, enumerate_all):
    """count distinct items uniformly from a class of class_size.

    Batched rejection sampling while the draw is sparse (draw_batch
    returns uniform class members with replacement; duplicates are
    rejected in draw order); for dense draws the class is materialized
    and numpy's without-replacement choice is used.  Both paths give the
    uniform distribution over count-subsets.
    """
    if count == 0:
        return set()
    if count > class_size:
        raise ValidationError("requested more items than the class holds")
    if 4 * count >= class_size:
        if class_size > _MATERIALIZE_CAP:
            raise ValidationError(
                f"dense draw of {count} from {class_size} items is beyond desk scale"
            )
        pool = enumerate_all()
        idx = rng.choice(class_size, size=count, replace=False)
        return {pool[i] for i in idx}
    chosen: set[int] = set()
    while len(chosen) < count:
        need = count - len(chosen)
        for item in draw_batch(need + (need >> 1) + 8):
            item = int(item)
            if item not in chosen:
                chosen.add(item)
                if len(chosen) == count:
                    break
    return chosen


def _has_duplicate_rows(rows: np.ndarray) -> np.ndarray:
    srt = np.sort(rows, axis=1)
    return (srt[:, 1:] == srt[:, :-1]).any(axis=1)


def _uniform_side_subsets(rng: np.random.Generator, side: np.ndarray, k: int, h: int) -> np.ndarray:
    """(k, h) sorted vertex rows, each a uniform h-subset of `side`."""
    rows = rng.integers(0, side.size, size=(k, h))
    bad = _has_duplicate_rows(rows)
    while bad.any():
        rows[bad] = rng.integers(0, side.size, size=(int(bad.sum()), h))
        bad = _has_duplicate_rows(rows)
    return np.sort(side[rows], axis=1)


def sample_hypergraph(params: ModelParams, sigma: Labeling, seed: int) -> Hypergraph:
    """Draw one hypergraph: each monochromatic h-subset appears with
    probability p, each other with probability q, independently.

    Implemented by two-stage binomial sampling (class counts first, then
    uniform positions without replacement), which is distributionally
    identical to per-subset coin flips but runs in O(expected edges).
    """
    n, h = params.n, params.h
    if sigma.n != n:
        raise ValidationError("labeling length != n")
    total = binom(n, h)
    if total >= (1 << 62):
        raise ValidationError(f"C({n},{h}) too large to sample")
    labels = sigma.labels
    plus = [i for i in range(n) if labels[i] == 1]
    minus = [i for i in range(n) if labels[i] == -1]
    n_in_plus = binom(len(plus), h)
    n_in_minus = binom(len(minus), h)
    n_in = n_in_plus + n_in_minus
    n_cross = total - n_in

    rng = make_rng(seed)
    k_in = int(rng.binomial(n_in, params.p)) if n_in else 0
    k_cross = int(rng.binomial(n_cross, params.q)) if n_cross else 0

    plus_arr = np.asarray(plus, dtype=np.int64)
    minus_arr = np.asarray(minus, dtype=np.int64)
    labels_arr = sigma.array

    def draw_mono_batch(size: int) -> np.ndarray:
        plus_side = rng.random(size) * n_in < n_in_plus
        out = np.empty(size, dtype=np.int64)
        for side, mask in ((plus_arr, plus_side), (minus_arr, ~plus_side)):
            k = int(mask.sum())
            if k:
                out[mask] = rank_array(_uniform_side_subsets(rng, side, k, h), n)
        return out

    def enumerate_mono():
        ranks = [rank_subset(c, n) for c in combinations(plus, h)]
        ranks += [rank_subset(c, n) for c in combinations(minus, h)]
        return ranks

    def draw_cross_batch(size: int) -> np.ndarray:
        cand = rng.integers(0, total, size=size)
        lab = labels_arr[unrank_array(cand, n, h)]
        mono = (lab == lab[:, :1]).all(axis=1)
        return cand[~mono]

    def enumerate_cross():
        return [
            r
            for r in range(total)
            if not is_monochromatic(unrank_subset(r, n, h), labels)
        ]

    edges = _uniform_distinct(rng, draw_mono_batch, k_in, n_in, enumerate_mono)
    edges |= _uniform_distinct(rng, draw_cross_batch, k_cross, n_cross, enumerate_cross)
    return Hypergraph(n, h, frozenset(edges))
