"""Numerical flux functions g(rho_L, rho_R, q_L, q_R).

All three fluxes are quadratic in their four arguments, consistent with the
model flux rho*(1 - q) for the velocity v(q) = 1 - q:

* ``lf``       (rho_L v(q_L) + rho_R v(q_R))/2 + alpha/2 (rho_L - rho_R)
* ``godunov``  rho_L v(q_R)
* ``mlf``      (rho_L + rho_R)/2 v(q_R) + alpha/2 (rho_L - rho_R)

``check_assumption4`` and ``check_assumption5`` verify the flux admissibility
conditions (this package's assumptions A4/A5): the quadratic structure of g,
consistency, sign constraints on the first partials theta^(1..4) and on the
cross second partials, and the CFL bound lambda * sum_i ||theta^(i)||_inf < 1.
Every constraint is affine in each argument, so extrema over the [0,1]^4 box
are attained at its corners; a seeded interior audit guards the corner logic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from .errors import DomainError


class FluxKind(str, Enum):
    LAX_FRIEDRICHS = "lf"
    GODUNOV = "godunov"
    MODIFIED_LAX_FRIEDRICHS = "mlf"


@dataclass(frozen=True)
class ThetaBundle:
    """First partials of g with respect to (rho_L, rho_R, q_L, q_R).

    theta1/theta2 depend only on (q_L, q_R); theta3/theta4 only on
    (rho_L, rho_R).  Entries broadcast with array arguments.
    """

    theta1: float | np.ndarray
    theta2: float | np.ndarray
    theta3: float | np.ndarray
    theta4: float | np.ndarray

    def as_tuple(self):
        return (self.theta1, self.theta2, self.theta3, self.theta4)


@dataclass(frozen=True)
class FluxFunction:
    kind: FluxKind
    alpha: float = 2.0

    def __post_init__(self):
        if self.alpha < 0.0:
            raise DomainError(f"numerical viscosity must be nonnegative, got {self.alpha}")

    @property
    def gamma(self) -> np.ndarray:
        """4x4 matrix of second partials, argument order (rho_L, rho_R, q_L, q_R)."""
        g = np.zeros((4, 4))
        if self.kind is FluxKind.LAX_FRIEDRICHS:
            g[0, 2] = g[2, 0] = -0.5
            g[1, 3] = g[3, 1] = -0.5
        elif self.kind is FluxKind.GODUNOV:
            g[0, 3] = g[3, 0] = -1.0
        else:
            g[0, 3] = g[3, 0] = -0.5
            g[1, 3] = g[3, 1] = -0.5
        g.setflags(write=False)
        return g

    def gradient_at_zero(self) -> np.ndarray:
        if self.kind is FluxKind.GODUNOV:
            return np.array([1.0, 0.0, 0.0, 0.0])
        a = 0.5 * self.alpha
        return np.array([0.5 + a, 0.5 - a, 0.0, 0.0])

    def eval(self, rho_l, rho_r, q_l, q_r):
        """Interface flux; broadcasts over array arguments."""
        if self.kind is FluxKind.LAX_FRIEDRICHS:
            return 0.5 * (rho_l * (1.0 - q_l) + rho_r * (1.0 - q_r)) + 0.5 * self.alpha * (
                rho_l - rho_r
            )
        if self.kind is FluxKind.GODUNOV:
            return rho_l * (1.0 - q_r)
        return 0.5 * (rho_l + rho_r) * (1.0 - q_r) + 0.5 * self.alpha * (rho_l - rho_r)

    def partials(self, rho_l, rho_r, q_l, q_r) -> ThetaBundle:
        """Exact first partials of ``eval`` at the given point."""
        a = 0.5 * self.alpha
        if self.kind is FluxKind.LAX_FRIEDRICHS:
            return ThetaBundle(
                theta1=0.5 * (1.0 - q_l) + a,
                theta2=0.5 * (1.0 - q_r) - a,
                theta3=-0.5 * rho_l,
                theta4=-0.5 * rho_r,
            )
        if self.kind is FluxKind.GODUNOV:
            zero = np.zeros_like(np.asarray(q_r, dtype=float))
            zero = zero if zero.ndim else 0.0
            return ThetaBundle(
                theta1=1.0 - q_r,
                theta2=zero,
                theta3=zero,
                theta4=-np.asarray(rho_l, dtype=float) if np.ndim(rho_l) else -rho_l,
            )
        return ThetaBundle(
            theta1=0.5 * (1.0 - q_r) + a,
            theta2=0.5 * (1.0 - q_r) - a,
            theta3=np.zeros_like(np.asarray(rho_l, dtype=float)) if np.ndim(rho_l) else 0.0,
            theta4=-0.5 * (rho_l + rho_r),
        )

    def theta_sup_norms(self) -> tuple[float, float, float, float]:
        """Sup norms of the four partials over the [0,1]^4 box (corner maxima)."""
        sup = [0.0, 0.0, 0.0, 0.0]
        for corner in product((0.0, 1.0), repeat=4):
            th = self.partials(*corner).as_tuple()
            for i in range(4):
                sup[i] = max(sup[i], abs(float(th[i])))
        return tuple(sup)


def flux_from_name(name: str, alpha: float = 2.0) -> FluxFunction:
    """Construct a flux by its config name: lf, godunov, mlf."""
    try:
        kind = FluxKind(name)
    except ValueError:
        valid = ", ".join(k.value for k in FluxKind)
        raise DomainError(f"unknown flux {name!r}; expected one of: {valid}") from None
    return FluxFunction(kind=kind, alpha=alpha)


@dataclass(frozen=True)
class ClauseResult:
    name: str
    passed: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class Assumption4Report:
    clauses: tuple[ClauseResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.clauses)

    def failed(self) -> tuple[ClauseResult, ...]:
        return tuple(c for c in self.clauses if not c.passed)


def _taylor_eval(flux: FluxFunction, x: np.ndarray) -> float:
    grad = flux.gradient_at_zero()
    return float(grad @ x + 0.5 * x @ flux.gamma @ x)


def _clause_iv_margins(flux: FluxFunction, point) -> dict[str, float]:
    """Signed margins of the monotonicity constraints; nonnegative means pass.

    The two mixed theta/gamma constraints couple the partials with the sums
    gamma13+gamma23 and gamma23+gamma24; with that coupling the lf and mlf
    fluxes pass exactly when alpha >= 2, the godunov flux always.
    """
    rho_l, rho_r, q_l, q_r = point
    th = flux.partials(rho_l, rho_r, q_l, q_r)
    g = flux.gamma
    return {
        "theta1_nonneg": float(th.theta1),
        "theta2_nonpos": -float(th.theta2),
        "theta3_nonpos": -float(th.theta3),
        "theta4_nonpos": -float(th.theta4),
        "mixed_lower": float(th.theta1 + th.theta3 + (g[0, 2] + g[1, 2])),
        "mixed_upper": -(float(th.theta2) - (g[1, 2] + g[1, 3])),
        "pair_bound": -(float(th.theta3 + th.theta4) + min(rho_l, rho_r)),
    }


def check_assumption4(flux: FluxFunction, n_interior: int = 256, seed: int = 0) -> Assumption4Report:
    """Verify the flux admissibility clauses; returns a per-clause report."""
    tol = 1e-12
    clauses: list[ClauseResult] = []
    rng = np.random.default_rng(seed)

    # (i) quadratic: the gradient/second-partials reconstruction reproduces
    # eval everywhere, hence third differences vanish.
    pts = rng.random((32, 4))
    quad_ok, quad_witness = True, None
    for x in pts:
        if abs(_taylor_eval(flux, x) - float(flux.eval(*x))) > tol:
            quad_ok, quad_witness = False, tuple(x)
            break
    clauses.append(ClauseResult("quadratic", quad_ok, quad_witness))

    # (ii) consistency g(r, r, q, q) = r (1 - q).
    cons_ok, cons_witness = True, None
    grid = np.linspace(0.0, 1.0, 21)
    for r in grid:
        for q in grid:
            if abs(float(flux.eval(r, r, q, q)) - r * (1.0 - q)) > 1e-14:
                cons_ok, cons_witness = False, (r, q)
                break
        if not cons_ok:
            break
    clauses.append(ClauseResult("consistency", cons_ok, cons_witness))

    # (iii) structure of the second partials.
    g = flux.gamma
    cross = (g[0, 2], g[1, 2], g[0, 3], g[1, 3])
    gamma_ok = (
        g[0, 0] == g[0, 1] == g[1, 1] == 0.0
        and g[2, 2] == g[2, 3] == g[3, 3] == 0.0
        and all(c <= 0.0 for c in cross)
        and abs(sum(cross) + 1.0) <= tol
        and np.allclose(g, g.T)
    )
    clauses.append(ClauseResult("gamma_structure", bool(gamma_ok), None))

    # (iv) sign and monotonicity constraints: corners of the box, then a
    # seeded interior audit of the same margins.
    points = [tuple(map(float, c)) for c in product((0.0, 1.0), repeat=4)]
    points += [tuple(map(float, x)) for x in rng.random((n_interior, 4))]
    results: dict[str, ClauseResult] = {}
    for point in points:
        for name, margin in _clause_iv_margins(flux, point).items():
            if margin < -tol and name not in results:
                results[name] = ClauseResult(name, False, point)
    for name in _clause_iv_margins(flux, (0.0, 0.0, 0.0, 0.0)):
        clauses.append(results.get(name, ClauseResult(name, True, None)))

    return Assumption4Report(clauses=tuple(clauses))


def check_assumption5(flux: FluxFunction, lam: float) -> tuple[bool, float]:
    """CFL admissibility: return (ok, 1 - lambda * sum of theta sup norms)."""
    if lam <= 0.0:
        raise DomainError(f"CFL ratio must be positive, got {lam}")
    margin = 1.0 - lam * sum(flux.theta_sup_norms())
    return margin > 0.0, margin
