"""Look-ahead averaging kernels.

A kernel is a probability density w on [0, 1]; the solver uses its rescaling
w_delta(s) = w(s/delta)/delta on [0, delta], which concentrates to a point
mass as the horizon delta shrinks.  Three closed-form profiles are provided:

* ``linear``       w(s) = 2(1 - s)
* ``exponential``  w(s) = exp(-s)/(1 - exp(-1))   (truncated to [0, 1])
* ``constant``     w(s) = 1

The constant profile is admitted for experimentation even though it is not
strictly decreasing; ``is_strictly_decreasing`` reports the violation instead
of rejecting it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

_EXP_NORM = 1.0 - math.exp(-1.0)  # normalizer of the truncated exponential


class KernelProfile(str, Enum):
    LINEAR_DECREASING = "linear"
    EXPONENTIAL = "exponential"
    CONSTANT = "constant"


@dataclass(frozen=True)
class Kernel:
    """A kernel profile together with the constants used by the diagnostics.

    ``value_at_zero`` is w(0) and ``min_neg_slope`` is min over [0,1] of
    -w'(s); both enter the weight-gap constant and the horizon threshold
    ``delta0``.  They are analytic so that those derived constants are exact.
    """

    profile_id: KernelProfile
    value_at_zero: float
    min_neg_slope: float

    @property
    def is_strictly_decreasing(self) -> bool:
        return self.profile_id is not KernelProfile.CONSTANT

    def profile(self, u):
        """Base density w(u) for u in [0, 1]; accepts scalars or arrays."""
        u = np.asarray(u, dtype=float)
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise DomainError("kernel profile argument outside [0, 1]")
        if self.profile_id is KernelProfile.LINEAR_DECREASING:
            out = 2.0 * (1.0 - u)
        elif self.profile_id is KernelProfile.EXPONENTIAL:
            out = np.exp(-u) / _EXP_NORM
        else:
            out = np.ones_like(u)
        return out if out.ndim else float(out)

    def cdf(self, u):
        """Antiderivative W(u) = integral of w over [0, u], with W(1) = 1."""
        u = np.asarray(u, dtype=float)
        if self.profile_id is KernelProfile.LINEAR_DECREASING:
            out = u * (2.0 - u)
        elif self.profile_id is KernelProfile.EXPONENTIAL:
            out = (1.0 - np.exp(-u)) / _EXP_NORM
        else:
            out = u.copy()
        return out if out.ndim else float(out)

    def eval_scaled(self, delta: float, s):
        """Rescaled kernel w_delta(s) = w(s/delta)/delta for s in [0, delta]."""
        if delta <= 0.0:
            raise DomainError(f"horizon must be positive, got {delta}")
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.0) or np.any(s > delta):
            raise DomainError(f"argument outside [0, {delta}]")
        out = self.profile(s / delta) / delta
        return out if np.ndim(out) else float(out)

    def integral_scaled(self, delta: float, a: float, b: float) -> float:
        """Exact integral of w_delta over [a, b] for 0 <= a <= b <= delta."""
        if delta <= 0.0:
            raise DomainError(f"horizon must be positive, got {delta}")
        if a < 0.0 or b > delta or a > b:
            raise DomainError(f"bad integration bounds [{a}, {b}] for horizon {delta}")
        return float(self.cdf(b / delta) - self.cdf(a / delta))


_PROFILES = {
    KernelProfile.LINEAR_DECREASING: (2.0, 2.0),
    KernelProfile.EXPONENTIAL: (1.0 / _EXP_NORM, math.exp(-1.0) / _EXP_NORM),
    KernelProfile.CONSTANT: (1.0, 0.0),
}


def kernel_from_name(name: str) -> Kernel:
    """Construct a kernel by its config name: linear, exponential, constant."""
    try:
        profile = KernelProfile(name)
    except ValueError:
        valid = ", ".join(p.value for p in KernelProfile)
        raise DomainError(f"unknown kernel {name!r}; expected one of: {valid}") from None
    w0, slope = _PROFILES[profile]
    return Kernel(profile, w0, slope)


def eval_scaled(kernel: Kernel, delta: float, s):
    """Evaluate the rescaled kernel w_delta(s); see ``Kernel.eval_scaled``."""
    return kernel.eval_scaled(delta, s)


def profile_constants(kernel: Kernel) -> tuple[float, float]:
    """Return (w(0), min over [0,1] of -w'(s)) for the base profile."""
    return kernel.value_at_zero, kernel.min_neg_slope
