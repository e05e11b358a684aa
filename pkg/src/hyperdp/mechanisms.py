"""The four hyperedge-privacy mechanisms.

All mechanisms are pure functions of (inputs, seed).  Their privacy is a
property of the output distribution over the internal randomness, which
the audit module evaluates analytically; seeds here only make individual
runs reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .estimators import _rank_space, local_swap_gap, ml_exhaustive, spectral_recover
from .hypergraph import Hypergraph, Labeling, ValidationError, canonical_labelings
from .model import ModelParams, make_rng


class PrivacySoundnessError(RuntimeError):
    """Raised when a request would overstate a privacy guarantee."""


@dataclass(frozen=True)
class PrivacyBudget:
    eps: float
    delta: float = 0.0
    t: float | None = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ValidationError(f"eps must be positive, got {self.eps}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValidationError(f"delta must lie in [0, 1], got {self.delta}")

    @classmethod
    def with_exponent(cls, eps: float, t: float, n: int) -> "PrivacyBudget":
        """Budget with delta = n^(-t)."""
        if t <= 0:
            raise ValidationError(f"t must be positive, got {t}")
        return cls(eps=eps, delta=float(n) ** (-t), t=t)


@dataclass(frozen=True)
class MechanismOutput:
    labeling: Labeling
    mechanism: str
    released_bottom: bool = False
    perturbed_graph: Hypergraph | None = None
    diagnostics: dict = field(default_factory=dict)


def laplace_sample(scale: float, seed: int | None = None, rng: np.random.Generator | None = None) -> float:
    """Laplace(0, scale) draw via the inverse CDF.

    u in (-1/2, 1/2) maps to -scale*sgn(u)*ln(1-2|u|).
    """
    if scale <= 0:
        raise ValidationError(f"scale must be positive, got {scale}")
    if rng is None:
        rng = make_rng(seed if seed is not None else 0)
    u = rng.random() - 0.5
    while u == -0.5:
        u = rng.random() - 0.5
    return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))


def stability_release_threshold(budget: PrivacyBudget) -> float:
    """ln(1/delta)/eps, the noisy-distance release bar."""
    if not 0.0 < budget.delta < 1.0:
        raise ValidationError("stability mechanism needs delta in (0, 1)")
    return math.log(1.0 / budget.delta) / budget.eps


def _uniform_bottom(n: int, label_space: str, rng: np.random.Generator) -> Labeling:
    space = canonical_labelings(n, label_space)
    idx = int(rng.integers(0, space.shape[0]))
    return Labeling.from_iterable(space[idx])


def mech_stability(
    H: Hypergraph,
    params: ModelParams,
    budget: PrivacyBudget,
    seed: int,
    estimator: str = "ml",
    label_space: str = "balanced",
    d_mode: str = "exact",
    acknowledge_noncertified: bool = False,
) -> MechanismOutput:
    """Release the estimate only when the noisy instability distance
    clears ln(1/delta)/eps; otherwise release a uniform labeling.

    d_mode='exact' computes the true distance (small n only) and is the
    only certified configuration.  d_mode='surrogate' substitutes the
    local swap gap of the estimate, whose sensitivity is NOT established;
    it is refused unless acknowledge_noncertified=True and the output is
    tagged certified=False.
    """
    threshold = stability_release_threshold(budget)
    rng = make_rng(seed)
    lap = laplace_sample(1.0 / budget.eps, rng=rng)
    if label_space == "balanced" and H.n % 2:
        label_space = "all"

    if estimator == "ml":
        estimate = ml_exhaustive(H, params, label_space=label_space)
    elif estimator == "spectral":
        estimate = spectral_recover(H)
    else:
        raise ValidationError(f"unknown estimator {estimator!r}")

    if d_mode == "exact":
        if estimator != "ml":
            raise ValidationError("exact distance mode requires the ml estimator")
        from .exhaustive import family_for

        fam = family_for(params, label_space)
        d = fam.distance(fam.mask_of(H))
        release = d + lap > threshold
        d_witness = "inf" if math.isinf(d) else str(int(d))
        certified = True
    elif d_mode == "surrogate":
        if not acknowledge_noncertified:
            raise PrivacySoundnessError(
                "surrogate distance mode is NON-CERTIFIED; pass "
                "acknowledge_noncertified=True to run it anyway"
            )
        gap = local_swap_gap(H, estimate.labeling)
        release = gap + lap > threshold
        d_witness = str(gap)
        certified = False
    else:
        raise ValidationError(f"unknown d_mode {d_mode!r}")

    diagnostics = {
        "d": d_witness,
        "d_mode": d_mode,
        "laplace_draw": lap,
        "threshold": threshold,
        "certified": certified,
    }
    if release:
        return MechanismOutput(
            labeling=estimate.labeling.canonical(),
            mechanism="stability",
            diagnostics=diagnostics,
        )
    bottom = _uniform_bottom(H.n, label_space, rng)
    return MechanismOutput(
        labeling=bottom.canonical(),
        mechanism="stability",
        released_bottom=True,
        diagnostics=diagnostics,
    )


def rr_flip_probability(eps: float) -> float:
    """Membership flip probability nu = 1/(e^eps + 1)."""
    if eps < 0:
        raise ValidationError(f"eps must be nonnegative, got {eps}")
    return 1.0 / (math.exp(eps) + 1.0)


def mech_randomized_response(H: Hypergraph, eps: float, seed: int) -> MechanismOutput:
    """Flip every potential hyperedge independently with probability
    nu = 1/(e^eps + 1); the perturbed graph is the private output.

    Sparse implementation: binomial flip counts per membership class,
    positions uniform without replacement -- identical in distribution to
    per-subset coin flips.
    """
    total = H.total_subsets
    if total >= (1 << 62):
        raise ValidationError(f"C({H.n},{H.h}) too large to perturb")
    nu = rr_flip_probability(eps)
    rng = make_rng(seed)
    present = np.fromiter(sorted(H.edges), dtype=np.int64, count=len(H.edges))
    n_present = present.size
    n_absent = total - n_present
    flips_present = int(rng.binomial(n_present, nu)) if n_present else 0
    flips_absent = int(rng.binomial(n_absent, nu)) if n_absent else 0

    drop = set(
        present[rng.choice(n_present, size=flips_present, replace=False)].tolist()
    ) if flips_present else set()

    add: set[int] = set()
    if flips_absent:
        if 4 * flips_absent >= n_absent:
            present_set = set(present.tolist())
            absent = np.array(
                [r for r in range(total) if r not in present_set], dtype=np.int64
            )
            add = set(absent[rng.choice(n_absent, size=flips_absent, replace=False)].tolist())
        else:
            while len(add) < flips_absent:
                need = flips_absent - len(add)
                cand = rng.integers(0, total, size=need + (need >> 1) + 8)
                for r in cand[~np.isin(cand, present)]:
                    r = int(r)
                    if r not in add:
                        add.add(r)
                        if len(add) == flips_absent:
                            break

    edges = (H.edges - drop) | add
    perturbed = Hypergraph(H.n, H.h, frozenset(edges))
    placeholder = Labeling.from_iterable([1] * H.n)
    return MechanismOutput(
        labeling=placeholder,
        mechanism="rr",
        perturbed_graph=perturbed,
        diagnostics={"nu": nu, "flips": flips_present + flips_absent},
    )


def _sample_categorical_log(rng: np.random.Generator, log_weights: np.ndarray) -> tuple[int, np.ndarray]:
    shifted = log_weights - log_weights.max()
    weights = np.exp(shifted)
    probs = weights / weights.sum()
    idx = int(rng.choice(probs.size, p=probs))
    return idx, probs


def mech_bayes_sampling(
    H: Hypergraph,
    params: ModelParams,
    seed: int,
    label_space: str = "balanced",
) -> MechanismOutput:
    """Sample a labeling from the exact posterior given the observed
    hypergraph (uniform prior over the label space)."""
    labels, psi, scores, _, _ = _rank_space(H, params, label_space)
    rng = make_rng(seed)
    idx, probs = _sample_categorical_log(rng, scores)
    return MechanismOutput(
        labeling=Labeling.from_iterable(labels[idx]),
        mechanism="bayes",
        diagnostics={"posterior_max": float(probs.max()), "log_weight": float(scores[idx])},
    )


def mech_exponential_sampling(
    H: Hypergraph,
    eps: float,
    seed: int,
    label_space: str = "balanced",
) -> MechanismOutput:
    """Sample a labeling with probability proportional to
    exp(-eps * cross_cluster_count); the weights are normalized over the
    label space so they form a distribution."""
    if eps < 0:
        raise ValidationError(f"eps must be nonnegative, got {eps}")
    labels = canonical_labelings(H.n, label_space)
    psi = kernels.cross_counts(H.edge_vertex_array(), labels)
    log_w = -eps * psi.astype(np.float64)
    rng = make_rng(seed)
    idx, probs = _sample_categorical_log(rng, log_w)
    return MechanismOutput(
        labeling=Labeling.from_iterable(labels[idx]),
        mechanism="expo",
        diagnostics={"psi": int(psi[idx]), "log_weight": float(log_w[idx])},
    )
