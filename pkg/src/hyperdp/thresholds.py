"""Closed-form exact-recovery thresholds for every mechanism, region
classification, and the combinatorial/Chernoff bounds backing them.

Conventions (fixed package-wide):
  - all logarithms are natural;
  - recovery margins must be STRICTLY positive to count as satisfied
    (boundary points are classified as not recoverable);
  - the privacy-budget floor of the stability mechanism is non-strict
    (eps >= floor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .hypergraph import ValidationError, binom


@dataclass(frozen=True)
class ThresholdResult:
    mechanism: str
    satisfied: bool
    margin: float
    auxiliaries: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "mechanism": self.mechanism,
            "satisfied": self.satisfied,
            "margin": self.margin,
            "auxiliaries": self.auxiliaries,
        }


def _check_ab(a: float, b: float) -> None:
    if a < b or b < 0:
        raise ValidationError(f"need a >= b >= 0, got a={a}, b={b}")


def nonprivate_threshold(a: float, b: float, h: int) -> ThresholdResult:
    """(sqrt(a) - sqrt(b))^2 > 2^(h-1)."""
    _check_ab(a, b)
    margin = (math.sqrt(a) - math.sqrt(b)) ** 2 - 2.0 ** (h - 1)
    return ThresholdResult("nonprivate", margin > 0, margin)


def stability_mu(a: float, b: float, h: int, eps: float, t: float) -> float:
    """Joint-root form of the stability recovery quantity:
    a + b - sqrt((t+1)^2/(4 eps^2) (h/(h-1))^(2h-2) + 4ab)."""
    k = (h / (h - 1.0)) ** (2 * h - 2)
    return a + b - math.sqrt((t + 1.0) ** 2 / (4.0 * eps**2) * k + 4.0 * a * b)


def stability_threshold(a: float, b: float, h: int, eps: float, t: float) -> ThresholdResult:
    """Two-part stability condition: budget floor
    2 eps/(t+1) >= ln(a/b) (non-strict) and recovery margin
    mu(a, b, h, eps, t) > 2^(h-1) (strict)."""
    _check_ab(a, b)
    if b <= 0:
        raise ValidationError("stability threshold needs b > 0")
    if eps <= 0 or t <= 0:
        raise ValidationError(f"need eps > 0 and t > 0, got eps={eps}, t={t}")
    budget_floor = (t + 1.0) / 2.0 * math.log(a / b)
    budget_ok = eps >= budget_floor
    # Split-root form; algebraically equal to the joint-root form
    # (2*sqrt(x/16 + y) == sqrt(x/4 + 4y)).
    k = (h / (h - 1.0)) ** (2 * h - 2)
    split_form = a + b - 2.0 * math.sqrt((t + 1.0) ** 2 / (16.0 * eps**2) * k + a * b)
    mu = stability_mu(a, b, h, eps, t)
    margin = mu - 2.0 ** (h - 1)
    return ThresholdResult(
        "stability",
        budget_ok and margin > 0,
        margin,
        auxiliaries={
            "mu": mu,
            "split_form": split_form,
            "budget_floor": budget_floor,
            "budget_ok": budget_ok,
            "recovery_ok": margin > 0,
        },
    )


def stability_sufficient_bound(a: float, b: float, h: int, eps: float, t: float) -> bool:
    """Simplified sufficient condition:
    (sqrt(a)-sqrt(b))^2 >= 2^(h-1) [1 + (t+1)/(2 eps) (h/(2h-2))^(h-1)].
    Implies the mu-based margin whenever it holds."""
    rhs = 2.0 ** (h - 1) * (
        1.0 + (t + 1.0) / (2.0 * eps) * (h / (2.0 * h - 2.0)) ** (h - 1)
    )
    return (math.sqrt(a) - math.sqrt(b)) ** 2 >= rhs


def rr_lambda(eps: float, n: int, h: int) -> float:
    """Noise-density parameter: e^(-eps) = lambda * ln(n) / C(n-1, h-1)."""
    if eps <= 0 or n <= h:
        raise ValidationError(f"need eps > 0 and n > h, got eps={eps}, n={n}, h={h}")
    return math.exp(-eps) * binom(n - 1, h - 1) / math.log(n)


def rr_threshold(a: float, b: float, h: int, eps: float, n: int) -> ThresholdResult:
    """(sqrt(a+lambda) - sqrt(b+lambda))^2 > 2^(h-1)."""
    _check_ab(a, b)
    lam = rr_lambda(eps, n, h)
    margin = (math.sqrt(a + lam) - math.sqrt(b + lam)) ** 2 - 2.0 ** (h - 1)
    return ThresholdResult("rr", margin > 0, margin, auxiliaries={"lambda": lam})


def rr_min_a(b: float, h: int, eps: float, n: int) -> float:
    """Smallest a with a positive randomized-response margin at (eps, n)."""
    lam = rr_lambda(eps, n, h)
    c = 2.0 ** ((h - 1) / 2.0)
    return (c + math.sqrt(b + lam)) ** 2 - lam


@dataclass(frozen=True)
class InversionResult:
    status: str  # "ok" | "always" | "never"
    value: float | None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def rr_min_eps(a: float, b: float, h: int, n: int) -> InversionResult:
    """Smallest eps whose randomized-response margin is positive.

    Closed form: the margin equals zero at lambda* = u^2 - b with
    u = (a - b - 2^(h-1)) / (2 * 2^((h-1)/2)); the margin is decreasing
    in lambda, and eps maps to lambda monotonically.  status='never' when
    even the non-private margin is not positive; status='always' when the
    required lambda* already exceeds the lambda at every positive eps.
    """
    _check_ab(a, b)
    c2 = 2.0 ** (h - 1)
    if (math.sqrt(a) - math.sqrt(b)) ** 2 <= c2:
        return InversionResult("never", None)
    u = (a - b - c2) / (2.0 * math.sqrt(c2))
    lam_star = u * u - b
    lam_at_zero_eps = binom(n - 1, h - 1) / math.log(n)  # eps -> 0+ limit
    if lam_star >= lam_at_zero_eps:
        return InversionResult("always", None)
    eps = -math.log(lam_star * math.log(n) / binom(n - 1, h - 1))
    return InversionResult("ok", eps)


def bayes_threshold(a: float, b: float, h: int) -> ThresholdResult:
    """eps0 = ln(a/b); recovery iff (1 - e^(-eps0))(a - b) > 2^(h-1)."""
    _check_ab(a, b)
    if b <= 0:
        raise ValidationError("bayes threshold needs b > 0")
    eps0 = math.log(a / b)
    margin = (1.0 - b / a) * (a - b) - 2.0 ** (h - 1)
    return ThresholdResult("bayes", margin > 0, margin, auxiliaries={"eps0": eps0})


def exponential_threshold(a: float, b: float, h: int, eps: float) -> ThresholdResult:
    """eps * (a - b) > 2^(h-1)."""
    _check_ab(a, b)
    if eps <= 0:
        raise ValidationError(f"need eps > 0, got {eps}")
    margin = eps * (a - b) - 2.0 ** (h - 1)
    return ThresholdResult("expo", margin > 0, margin)


REGION_GRAY = "gray"
REGION_WHITE = "white"
REGION_GREEN = "green"


def classify_region(a: float, eps: float, b: float = 1.0, h: int = 3, t: float = 1.0) -> str:
    """Recovery-region label at one (a, eps) point.

    gray: the stability margin quantity mu does not clear 2^(h-1)
    (irrecoverable under the mechanism); white: mu clears it but the
    budget floor eps >= (t+1)/2 ln(a/b) fails (only non-private recovery);
    green: both hold.
    """
    mu = stability_mu(a, b, h, eps, t)
    if not mu > 2.0 ** (h - 1):
        return REGION_GRAY
    if eps < (t + 1.0) / 2.0 * math.log(a / b):
        return REGION_WHITE
    return REGION_GREEN


def region_grid(
    a_range: tuple[float, float],
    eps_range: tuple[float, float],
    b: float = 1.0,
    h: int = 3,
    t: float = 1.0,
    steps: int = 50,
) -> list[tuple[float, float, str]]:
    """Row-major (a, eps, region) grid; both axes are inclusive linspaces."""
    if steps < 2:
        raise ValidationError("need at least 2 steps per axis")
    a_vals = np.linspace(a_range[0], a_range[1], steps)
    eps_vals = np.linspace(eps_range[0], eps_range[1], steps)
    return [
        (float(a), float(e), classify_region(float(a), float(e), b, h, t))
        for a in a_vals
        for e in eps_vals
    ]


def m_of_s(n: int, h: int, s: int) -> int:
    """Exact count of h-subsets split by swapping an s-subset across a
    balanced bipartition: m = 2 sum_i C(s, i) C(n-s, h-i), i = 1..min(h-1, s)."""
    if not 1 <= s <= n // 2:
        raise ValidationError(f"need 1 <= s <= n/2, got s={s}, n={n}")
    return 2 * sum(binom(s, i) * binom(n - s, h - i) for i in range(1, min(h - 1, s) + 1))


def m_lower_bound(n: int, h: int, s: int) -> float:
    """2 s (1 - s/n)^(h-1) C(n-1, h-1), the closed lower bound for m_of_s."""
    if not 1 <= s <= n // 2:
        raise ValidationError(f"need 1 <= s <= n/2, got s={s}, n={n}")
    return 2.0 * s * (1.0 - s / n) ** (h - 1) * binom(n - 1, h - 1)


def chernoff_theta(m: int, n: int, h: int, a: float, b: float, beta: float, lam: float) -> float:
    """theta(lambda) = m/C(n-1,h-1) (a + b - a e^-lambda - b e^lambda) - lambda beta."""
    M = m / binom(n - 1, h - 1)
    return M * (a + b - a * math.exp(-lam) - b * math.exp(lam)) - lam * beta


def chernoff_exponent(
    m: int, n: int, h: int, a: float, b: float, beta: float
) -> tuple[float, float]:
    """Best exponent of the binomial-difference tail bound.

    Returns (closed form, independent numeric maximization of
    theta(lambda)).  Closed form: with M = m/C(n-1,h-1) and
    gamma = sqrt(beta^2 + 4 M^2 a b), the maximum over lambda > 0 is
    M(a+b) - gamma - beta * ln((gamma - beta)/(2 M b)), attained at
    e^lambda = (gamma - beta)/(2 M b); at beta = 0 this reduces to
    M (sqrt(a) - sqrt(b))^2 with lambda* = ln(a/b)/2.  When
    beta >= M(a-b) the stationary point falls at lambda <= 0 and the
    supremum over lambda > 0 is the vacuous boundary value 0.
    """
    if a <= 0 or b <= 0 or beta < 0:
        raise ValidationError(f"need a, b > 0 and beta >= 0, got {a}, {b}, {beta}")
    M = m / binom(n - 1, h - 1)
    if beta >= M * (a - b):
        closed = 0.0
    elif beta == 0.0:
        closed = M * (math.sqrt(a) - math.sqrt(b)) ** 2
    else:
        gamma = math.sqrt(beta * beta + 4.0 * M * M * a * b)
        closed = M * (a + b) - gamma - beta * math.log((gamma - beta) / (2.0 * M * b))
    res = minimize_scalar(
        lambda lam: -chernoff_theta(m, n, h, a, b, beta, lam),
        bounds=(1e-12, 80.0),
        method="bounded",
        options={"xatol": 1e-13},
    )
    numeric = -float(res.fun)
    return closed, numeric


def tail_bound_exponent(n: int, h: int, s: int, a: float, b: float, eps: float, t: float) -> float:
    """Exponent E in the closed tail bound n^(-E) for the probability that
    the in-minus-cross binomial difference over m(s) trials falls below
    (t+1)/eps * ln(n):
    E = 4 s (1 - s/n) / 2^(h-1) * mu - (t+1)/(2 eps) * ln(a/b)."""
    mu = stability_mu(a, b, h, eps, t)
    return 4.0 * s * (1.0 - s / n) / 2.0 ** (h - 1) * mu - (t + 1.0) / (
        2.0 * eps
    ) * math.log(a / b)
