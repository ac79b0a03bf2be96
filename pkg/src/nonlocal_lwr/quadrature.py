"""Discrete weights for the look-ahead average.

The nonlocal density of cell j is q_j = sum_k w_k rho_{j+k} over an
m-cell stencil, m = ceil(delta/h).  The weight vector {w_k} is a Riemann-sum
discretization of the rescaled kernel; three rules are supported:

* ``left``             w_k = w_delta(k h) * |[k h, (k+1)h) inter [0, delta]|
* ``exact``            w_k = integral of w_delta over [k h, min((k+1)h, delta)]
* ``normalized-left``  left-endpoint values divided by their sum

The left-endpoint width equals h except for a final cell overhanging the
horizon, so w_k = w_delta(kh) h whenever delta is a multiple of h.  Keeping
the sample weighted by the covered width is what makes runs with h > delta
merely inconsistent (the stagnation regime) rather than CFL-unstable: the
bare product w_delta(0) h grows like h/delta there and blows the scheme up.

``check_assumption3`` reports whether a weight vector satisfies the
admissibility conditions the solver's a-priori estimates rely on (this
package's assumption A3): the sandwich bounds w_delta(kh) h >= w_k >=
w_delta((k+1)h) h, a uniform gap w_k - w_{k+1} >= c m^-2 between consecutive
weights, and the normalization sum w_k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .kernels import Kernel

# Relative slack when deciding whether delta/h sits on an integer; keeps
# m = ceil(delta/h) immune to one-ulp noise in delta = m*h round trips.
_RATIO_SNAP = 1e-9


class WeightRule(str, Enum):
    LEFT_ENDPOINT = "left"
    NORMALIZED_LEFT_ENDPOINT = "normalized-left"
    EXACT = "exact"


def rule_from_name(name: str) -> WeightRule:
    try:
        return WeightRule(name)
    except ValueError:
        valid = ", ".join(r.value for r in WeightRule)
        raise DomainError(f"unknown weight rule {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class QuadratureWeights:
    rule: WeightRule
    m: int
    weights: np.ndarray
    weight_sum: float

    def __post_init__(self):
        self.weights.setflags(write=False)


def stencil_size(delta: float, h: float) -> int:
    """Number of cells m = ceil(delta/h) covered by the horizon."""
    if delta <= 0.0 or h <= 0.0:
        raise DomainError(f"horizon and cell width must be positive, got {delta}, {h}")
    ratio = delta / h
    nearest = round(ratio)
    if nearest >= 1 and abs(ratio - nearest) <= _RATIO_SNAP * max(1.0, nearest):
        return int(nearest)
    return max(1, math.ceil(ratio))


def build_weights(kernel: Kernel, delta: float, h: float, rule: WeightRule | str) -> QuadratureWeights:
    """Build the m-cell weight vector for (kernel, delta, h) under ``rule``."""
    rule = WeightRule(rule)
    m = stencil_size(delta, h)
    k = np.arange(m, dtype=float)
    if rule is WeightRule.EXACT:
        # Telescoping closed-form integrals keep the total mass exactly 1.
        lo = np.clip(k * h / delta, 0.0, 1.0)
        hi = np.clip((k + 1.0) * h / delta, 0.0, 1.0)
        w = kernel.cdf(hi) - kernel.cdf(lo)
    else:
        u = np.clip(k * h / delta, 0.0, 1.0)
        width = np.minimum((k + 1.0) * h, delta) - k * h
        w = kernel.profile(u) * (width / delta)
        if rule is WeightRule.NORMALIZED_LEFT_ENDPOINT:
            w = w / w.sum()
    w = np.atleast_1d(np.asarray(w, dtype=float))
    return QuadratureWeights(rule=rule, m=m, weights=w, weight_sum=float(w.sum()))


@dataclass(frozen=True)
class Assumption3Report:
    """Outcome of the weight admissibility checks for one (rule, kernel) pair.

    ``gap_constant`` is min over interior k of (w_k - w_{k+1}) * m^2, the
    measured counterpart of the theoretical constant c; it is +inf for m = 1
    (a single weight imposes no gap condition).
    """

    sandwich_ok: bool
    gap_constant: float
    normalized: bool
    c_theoretical: float


def theoretical_gap_constant(kernel: Kernel, rule: WeightRule | str) -> float:
    """The constant c in w_k - w_{k+1} >= c m^-2 guaranteed for this pair."""
    rule = WeightRule(rule)
    if rule is WeightRule.NORMALIZED_LEFT_ENDPOINT:
        return kernel.min_neg_slope / (1.0 + kernel.value_at_zero)
    return kernel.min_neg_slope


def check_assumption3(
    weights: QuadratureWeights,
    kernel: Kernel,
    delta: float,
    h: float,
    tol: float = 1e-12,
) -> Assumption3Report:
    """Check the sandwich, gap, and normalization conditions; never raises."""
    w = weights.weights
    m = weights.m

    k = np.arange(m, dtype=float)
    upper = kernel.eval_scaled(delta, np.minimum(k * h, delta)) * h
    # Below the stencil's far edge the kernel is zero, so the lower sandwich
    # bound degenerates to 0 there.
    edge = (k + 1.0) * h
    inside = edge <= delta * (1.0 + 1e-12)
    lower = np.zeros(m)
    if np.any(inside):
        lower[inside] = kernel.eval_scaled(delta, np.minimum(edge[inside], delta)) * h
    sandwich_ok = bool(np.all(upper >= w - tol) and np.all(w >= lower - tol))

    if m >= 2:
        gap_constant = float(np.min(w[:-1] - w[1:]) * m * m)
    else:
        gap_constant = math.inf

    normalized = abs(weights.weight_sum - 1.0) <= tol
    return Assumption3Report(
        sandwich_ok=sandwich_ok,
        gap_constant=gap_constant,
        normalized=normalized,
        c_theoretical=theoretical_gap_constant(kernel, weights.rule),
    )
