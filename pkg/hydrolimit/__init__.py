from .constants import CollisionType, LayerKind, Law, LimitTag, Moment, Scenario, W1Mode
from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    FormatError,
    HydroLimitError,
    NumericalError,
    RunawayError,
    SingularityError,
    UnsupportedCollisionError,
)
from .profile import Profile
from .profiles import PROFILES, InverseLinearProfile, InverseSquareProfile
from .potential import PairPotential, check_admissible, force_magnitude, make_potential, potential_value
from .scattering import (
    ScatteringQuery,
    ScatteringResult,
    impact_for_deflection,
    interaction_time_bound,
    lab_deflection,
    pericenter_angle,
    pericenter_radius,
    scatter,
    simulate_encounter,
)
from .dynamics import (
    LatticeIntegrator,
    LatticeState,
    ParticleSystem2D,
    StepPolicy,
    Trajectory,
    integrate,
    reverse,
    total_energy,
    total_momentum,
)
from .checks import CheckList, CheckResult
from .cascade import (
    CascadePlan,
    DeflectionSchedule,
    build_cascade,
    deflection_schedule,
    plan_geometry,
    reverse_scenario,
    separation_check,
    tN_bound,
    transverse_init,
    verify_cascade,
)
from .measures import (
    EmpiricalMeasure,
    LimitMeasureSpec,
    MacroFields,
    discretize_limit,
    energy_split,
    from_state,
    macro_fields,
    push_forward_free,
    w1_distance,
)
from .hydro import (
    TestFunction,
    euler_1d_fields_check,
    gauss_panels,
    residual_fields_1d,
    residual_moment_1d,
    residual_pressureless,
    standard_battery,
)
from .collide1d import (
    System1D,
    free_transport_equivalence,
    layer_fields_closed_form,
    layer_fields_quadrature,
    nonuniqueness_report,
    simulate_1d,
    three_layer_init,
    two_layer_init,
)
from .config import RunConfig, StepConfig, ToleranceConfig, load_config

__all__ = [
    "CollisionType",
    "LayerKind",
    "Law",
    "LimitTag",
    "Moment",
    "Scenario",
    "W1Mode",
    "ConfigError",
    "ConstructionError",
    "DomainError",
    "FormatError",
    "HydroLimitError",
    "NumericalError",
    "RunawayError",
    "SingularityError",
    "UnsupportedCollisionError",
    "Profile",
    "PROFILES",
    "InverseLinearProfile",
    "InverseSquareProfile",
    "PairPotential",
    "check_admissible",
    "force_magnitude",
    "make_potential",
    "potential_value",
    "ScatteringQuery",
    "ScatteringResult",
    "impact_for_deflection",
    "interaction_time_bound",
    "lab_deflection",
    "pericenter_angle",
    "pericenter_radius",
    "scatter",
    "simulate_encounter",
    "LatticeIntegrator",
    "LatticeState",
    "ParticleSystem2D",
    "StepPolicy",
    "Trajectory",
    "integrate",
    "reverse",
    "total_energy",
    "total_momentum",
    "CheckList",
    "CheckResult",
    "CascadePlan",
    "DeflectionSchedule",
    "build_cascade",
    "deflection_schedule",
    "plan_geometry",
    "reverse_scenario",
    "separation_check",
    "tN_bound",
    "transverse_init",
    "verify_cascade",
    "EmpiricalMeasure",
    "LimitMeasureSpec",
    "MacroFields",
    "discretize_limit",
    "energy_split",
    "from_state",
    "macro_fields",
    "push_forward_free",
    "w1_distance",
    "TestFunction",
    "euler_1d_fields_check",
    "gauss_panels",
    "residual_fields_1d",
    "residual_moment_1d",
    "residual_pressureless",
    "standard_battery",
    "System1D",
    "free_transport_equivalence",
    "layer_fields_closed_form",
    "layer_fields_quadrature",
    "nonuniqueness_report",
    "simulate_1d",
    "three_layer_init",
    "two_layer_init",
    "RunConfig",
    "StepConfig",
    "ToleranceConfig",
    "load_config",
]
