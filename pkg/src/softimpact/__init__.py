"""Numerical laboratory for Hamiltonian systems with soft impacts in a wedge.

The package simulates both the hard-wall impact flow and its steep-smooth
regularization for a saddle-center background in a symmetric wedge, finds and
continues symmetric period-2 orbits with an analytic linearized return map,
classifies their stability, and computes allowed-motion (Hill's) regions and
their steepness convergence.
"""

from .errors import (
    ConfigError,
    DegenerateCollisionError,
    DomainError,
    EnergyDriftExceededError,
    EscapeError,
    EventOverflowError,
    InfeasibleEnergyError,
    NoConvergenceError,
    NoRootError,
    NotSymplecticError,
    SectionTimeoutError,
    SingularLinearizationError,
    SoftImpactError,
    StartOnWallError,
    StepUnderflowError,
)
from .model import (
    ConditionEntry,
    ConditionReport,
    CornerClass,
    EnergyBudget,
    JacobiSetup,
    PhaseState,
    Wall,
    WedgeModel,
    Window,
    background_potential,
    check_conditions,
    energy_budget,
    inside_wedge,
    jacobi_transform,
    model_from_dict,
    total_energy,
    v20_from_energy,
    wall_background_minimum,
    wall_direction,
    wall_distance,
    wall_distances,
    wall_normal,
    wall_potential,
)
from .impact import (
    CollisionEvent,
    ImpactTrajectory,
    ReflectionClass,
    Segment,
    classify_reflection,
    compare_flows,
    linear_flow,
    next_collision,
    propagate_impact,
    reflect,
)
from .smooth import (
    IntegratorConfig,
    SectionSpec,
    SlabSpec,
    SmoothTrajectory,
    hamiltonian_values,
    integrate_smooth,
    make_rhs,
    section_crossings,
    smooth_rhs,
)
from .orbits import (
    FIX_ENERGY,
    FIX_RE_MULTIPLIER,
    FIX_U10,
    PeriodicOrbit,
    ReturnMapCloud,
    Stability,
    classify_stability,
    find_period2_impact,
    find_period2_impact_at_energy,
    find_period2_impact_with_trace,
    find_period2_smooth,
    finite_difference_monodromy,
    impact_return_map,
    linearized_return_map_impact,
    return_map_factors,
    sample_return_map,
    smooth_return_map,
)
from .continuation import BifurcationCurve, ContinuationRun, bifurcation_scan, continue_orbit
from .hill import (
    BoundaryPolyline,
    HillCorner,
    HillRegion,
    classify_boundary_points,
    filtered_hausdorff,
    hausdorff_distance,
    impact_hill_region,
    smooth_hill_boundary,
)

__version__ = "0.1.0"
