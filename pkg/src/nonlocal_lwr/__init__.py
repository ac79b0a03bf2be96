"""Finite volume schemes for LWR traffic flow with look-ahead velocity."""

from .diagnostics import (
    Delta0Inputs,
    LipschitzTrace,
    TvdReport,
    check_lipschitz,
    check_tvd,
    delta0,
    fit_rate,
    l1_error,
    run_summary,
    total_variation,
)
from .errors import ConfigError, DomainError, NumericsError
from .fluxes import (
    Assumption4Report,
    FluxFunction,
    FluxKind,
    ThetaBundle,
    check_assumption4,
    check_assumption5,
    flux_from_name,
)
from .kernels import Kernel, KernelProfile, eval_scaled, kernel_from_name, profile_constants
from .quadrature import (
    Assumption3Report,
    QuadratureWeights,
    WeightRule,
    build_weights,
    check_assumption3,
    rule_from_name,
    stencil_size,
    theoretical_gap_constant,
)
from .solver import (
    BellShape,
    Grid,
    InitialData,
    RiemannData,
    RunConfig,
    Snapshot,
    SolutionField,
    TableData,
    Trajectory,
    build_grid,
    discretize_initial,
    initial_bounds,
    interface_fluxes,
    local_step,
    nonlocal_density,
    one_sided_lipschitz,
    run,
    run_local_reference,
    step,
)

__version__ = "0.1.0"
