"""Conflict-of-interest intensity over a gridded polar region.

Per-country utilities for oil, gas, fish and shipping routes are graded on a
small ordinal scale and combined cell by cell with threshold (leximax)
aggregation, first per resource and then across resources.
"""

from .aggregation import (
    ConflictClassField,
    Ordering,
    Quantile,
    Ranking,
    ReferenceVectors,
    aggregate_overall,
    aggregate_resource,
    classify,
    compare_intensity,
    rank_cells,
    sort_desc,
)
from .scenario import (
    PairParam,
    RunResult,
    ScenarioConfig,
    compare_runs,
    config_from_mapping,
    run_scenario,
    sweep_alpha,
)
from .utility import (
    DecayFunction,
    GradeField,
    MaritimeParams,
    QuantizeMode,
    Resource,
    ResourceLayer,
    UtilityField,
    deposit_utility,
    maritime_utility,
    quantize,
)
from .world import (
    Country,
    CountryKind,
    DistanceField,
    GridSpec,
    World,
    build_world,
    distance_field,
    great_circle_km,
)

__version__ = "0.1.0"
