"""Non-private community recovery and stability distances.

Estimators return canonical labelings (vertex 0 labeled +1) so the global
sign ambiguity never leaks into comparisons.  Ties break toward the
lexicographically smallest labeling (+1 sorts before -1), which keeps
every estimator a deterministic function of its input -- a property the
privacy mechanisms rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .hypergraph import (
    Hypergraph,
    Labeling,
    ValidationError,
    canonical_labelings,
    monochromatic_capacity,
)
from .model import ModelParams

ML_CAP = 20
SPECTRAL_CAP = 2000


@dataclass(frozen=True)
class RecoveryResult:
    labeling: Labeling
    score: float
    method: str
    flags: dict = field(default_factory=dict)

    @property
    def tied(self) -> bool:
        return bool(self.flags.get("tie", False))


@dataclass(frozen=True)
class StabilityDistance:
    """Exact distance to instability: d edits change the estimate.

    d = 0 means the maximizer is not unique (the estimate is unstable in
    place).  exceeded=True means no change was found within the search cap
    and d is a lower-bound witness only.
    """

    d: int | None
    exceeded: bool = False
    cap: int | None = None

    @property
    def value(self) -> float:
        return math.inf if self.exceeded else float(self.d)


def _check_pq(params: ModelParams) -> None:
    if not (0.0 < params.q <= params.p < 1.0):
        raise ValidationError(
            f"likelihood needs 0 < q <= p < 1, got p={params.p:.6g}, q={params.q:.6g}"
        )


def _loglik_from_counts(H: Hypergraph, psi: np.ndarray, n_in: np.ndarray, params: ModelParams) -> np.ndarray:
    from .exhaustive import _loglik_matrix

    return _loglik_matrix(H.total_subsets, H.num_edges, psi, n_in, params)


def _space_counts(H: Hypergraph, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(psi, n_in) integer arrays for a labeling matrix."""
    psi = kernels.cross_counts(H.edge_vertex_array(), labels)
    plus = (labels == 1).sum(axis=1)
    n_in = np.array(
        [monochromatic_capacity(int(k), labels.shape[1] - int(k), H.h) for k in plus],
        dtype=np.int64,
    )
    return psi, n_in


def log_likelihood(H: Hypergraph, sigma: Labeling, params: ModelParams) -> float:
    """Log-probability of observing H's edge set under the model given a
    labeling."""
    _check_pq(params)
    if sigma.n != H.n:
        raise ValidationError("labeling length != vertex count")
    psi, n_in = _space_counts(H, sigma.array[None, :])
    return float(_loglik_from_counts(H, psi, n_in, params)[0])


def _rank_space(H: Hypergraph, params: ModelParams, label_space: str):
    _check_pq(params)
    labels = canonical_labelings(H.n, label_space)
    psi, n_in = _space_counts(H, labels)
    scores = _loglik_from_counts(H, psi, n_in, params)
    best = int(np.argmax(scores))  # argmax returns the first (lex-smallest) maximizer
    tie = bool((scores == scores[best]).sum() > 1)
    return labels, psi, scores, best, tie


def ml_exhaustive(
    H: Hypergraph,
    params: ModelParams,
    label_space: str = "balanced",
    cap: int = ML_CAP,
) -> RecoveryResult:
    """Exhaustive maximum-likelihood estimate over a label space.

    Over the balanced space this coincides with minimizing the
    cross-cluster count (the in-class capacity term is constant there).
    """
    _check_pq(params)
    if H.n > cap:
        raise ValidationError(f"n={H.n} exceeds exhaustive cap {cap}")
    if label_space == "balanced" and H.n % 2:
        raise ValidationError("balanced label space requires even n")
    labels, psi, scores, best, tie = _rank_space(H, params, label_space)
    return RecoveryResult(
        labeling=Labeling.from_iterable(labels[best]),
        score=float(scores[best]),
        method=f"ml-{label_space}",
        flags={"tie": tie, "psi": int(psi[best])},
    )


def misclassification_error(est: Labeling, truth: Labeling) -> float:
    """Normalized Hamming distance up to global sign, in [0, 1]."""
    if est.n != truth.n:
        raise ValidationError("labeling length mismatch")
    e, t = est.array, truth.array
    direct = int((e != t).sum())
    flipped = int((e != -t).sum())
    return min(direct, flipped) / est.n


def exact_success(est: Labeling, truth: Labeling) -> bool:
    return misclassification_error(est, truth) == 0.0


def _components(W: np.ndarray) -> list[list[int]]:
    n = W.shape[0]
    seen = np.zeros(n, dtype=bool)
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in np.nonzero(W[v])[0]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(int(u))
        comps.append(sorted(comp))
    return comps


def _fiedler_split(W: np.ndarray, vertices: list[int]) -> tuple[list[int], list[int]]:
    """Median split of the second eigenvector of the symmetrically
    normalized Laplacian restricted to `vertices`."""
    sub = W[np.ix_(vertices, vertices)]
    deg = sub.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(deg)
    A = sub * inv_sqrt[:, None] * inv_sqrt[None, :]
    eigvals, eigvecs = np.linalg.eigh(A)
    fiedler = eigvecs[:, -2]  # second-largest of A == second-smallest of I - A
    order = np.argsort(fiedler, kind="stable")
    k = len(vertices) // 2
    low = [vertices[i] for i in order[:k]]
    high = [vertices[i] for i in order[k:]]
    return high, low


def spectral_recover(H: Hypergraph) -> RecoveryResult:
    """Clique-expansion spectral estimate: weight pairs by co-occurrence,
    take the normalized-Laplacian Fiedler vector, split at the median.

    Disconnected expansions are handled per component: a component larger
    than n/2 is itself Fiedler-split, all remaining components are
    assigned whole to the lighter side (largest first); the result is
    flagged.
    """
    if not H.edges:
        raise ValidationError("spectral recovery needs a nonempty hypergraph")
    if H.n > SPECTRAL_CAP:
        raise ValidationError(f"n={H.n} exceeds spectral cap {SPECTRAL_CAP}")
    W = kernels.expansion_weights(H.edge_vertex_array(), H.n)
    comps = _components(W)
    flags: dict = {"disconnected": len(comps) > 1}
    if len(comps) == 1:
        plus, _ = _fiedler_split(W, comps[0])
    else:
        sides: list[list[int]] = [[], []]
        comps = sorted(comps, key=lambda c: (-len(c), c[0]))
        if len(comps[0]) > H.n // 2:
            hi, lo = _fiedler_split(W, comps[0])
            sides[0].extend(hi)
            sides[1].extend(lo)
            comps = comps[1:]
        for comp in comps:
            lighter = 0 if len(sides[0]) <= len(sides[1]) else 1
            sides[lighter].extend(comp)
        plus = sides[0]
    labeling = Labeling.from_plus_side(H.n, plus).canonical()
    from .hypergraph import count_cross_cluster

    return RecoveryResult(
        labeling=labeling,
        score=float(-count_cross_cluster(H, labeling)),
        method="spectral",
        flags=flags,
    )


def instability_surrogate(
    H: Hypergraph, params: ModelParams, label_space: str = "balanced"
) -> int:
    """Gap between the best and second-best cross-cluster counts over the
    label space, measured from the ML estimate.

    Lower-bounds the exact distance to instability whenever the density
    contrast dominates the split-size term of the likelihood (always true
    over the balanced space, where that term is constant).
    """
    labels, psi, scores, best, tie = _rank_space(H, params, label_space)
    if tie:
        return 0
    others = np.delete(psi, best)
    if others.size == 0:
        raise ValidationError("label space has a single element")
    return int(others.min() - psi[best])


def local_swap_gap(H: Hypergraph, sigma: Labeling) -> int:
    """Scale surrogate for the instability gap: best cross-count change
    over single +/- swaps of a balanced labeling.  NON-CERTIFIED for
    privacy purposes; see mechanisms.mech_stability."""
    from .hypergraph import count_cross_cluster

    base = count_cross_cluster(H, sigma)
    arr = sigma.array
    plus = np.nonzero(arr == 1)[0]
    minus = np.nonzero(arr == -1)[0]
    rows = []
    for i in plus:
        for j in minus:
            swapped = arr.copy()
            swapped[i], swapped[j] = -1, 1
            rows.append(swapped)
    if not rows:
        return 0
    psi = kernels.cross_counts(H.edge_vertex_array(), np.asarray(rows, dtype=np.int8))
    return int(psi.min() - base)


def distance_to_instability_exact(
    H: Hypergraph,
    params: ModelParams,
    k_max: int = 3,
    label_space: str = "balanced",
    cap: int = ML_CAP,
) -> StabilityDistance:
    """Smallest number of edge edits that changes the ML estimate.

    Returns 0 when the maximizer already ties.  Enumerates all edit sets
    of size k for k = 1..k_max and reports exceeded=True when nothing
    within the cap changes the canonical output.
    """
    base = ml_exhaustive(H, params, label_space=label_space, cap=cap)
    if base.tied:
        return StabilityDistance(d=0, cap=k_max)
    base_labels = base.labeling.labels
    total = H.total_subsets
    for k in range(1, k_max + 1):
        for edit in combinations(range(total), k):
            edges = H.edges.symmetric_difference(edit)
            edited = Hypergraph(H.n, H.h, frozenset(edges))
            out = ml_exhaustive(edited, params, label_space=label_space, cap=cap)
            if out.labeling.labels != base_labels:
                return StabilityDistance(d=k, cap=k_max)
    return StabilityDistance(d=None, exceeded=True, cap=k_max)
