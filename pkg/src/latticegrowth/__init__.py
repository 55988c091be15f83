"""Growth constants of lattice walks confined to cones, via half-plane bounds."""

from .bounds import (
    BoundLedger,
    build_ledger,
    check_claimed_lower_bound,
    excursion_floor,
    resolve,
    rotate,
    rotation_relation,
    shuffle_bound,
)
from .certificates import GrowthBound
from .enumeration import (
    CountSeries,
    GrowthEstimate,
    brute_force_counts,
    count_excursions,
    count_halfspace,
    count_orthant,
    estimate_growth,
)
from .errors import LatticeGrowthError
from .halfplane import (
    AngleBound,
    CriticalPoint,
    Exponent1D,
    best_upper_bound,
    critical_angle,
    critical_point,
    growth_at_angle,
    half_plane_growth,
    project,
    tau_of,
    theta_sweep,
)
from .orthant import HyperplaneBound, conjectured_growth, hyperplane_growth, min_inventory_orthant
from .smallsteps import (
    FRPrediction,
    FRValues,
    ModelSurveyEntry,
    enumerate_small_models,
    fr_classify,
    fr_values,
)
from .stepset import (
    StepSet,
    covariance,
    drift,
    eval_inventory,
    format_stepset,
    is_orthant_essential,
    is_quarterplane_essential,
    parse_stepset,
    reflect_xy,
)

__version__ = "0.1.0"
