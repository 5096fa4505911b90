"""Cost-optimal energy-storage tender car counts for freight trains."""

__version__ = "0.1.0"

from .core_model import (
    ConfigurationEvaluation,
    ContinuousOptimum,
    SimpleModelParams,
    derivatives_simple,
    min_total_cost,
    optimal_n_continuous,
    optimal_n_integer,
    optimal_range,
    total_cost_simple,
    trip_time,
)
from .general_model import (
    CoefficientSet,
    GeneralModelParams,
    GeneralOptimum,
    coefficient_set,
    convexity_certificate,
    cost_attribution,
    fixed_cost,
    monotonicity_certificate,
    optimal_n_general,
    total_cost_general,
)
from .techno_params import (
    CommodityEnergyTable,
    DieselBaseline,
    TechInputs,
    battery_hourly,
    charge_cost_per_stop,
    delay_cost_lookup,
    diesel_baseline,
    effective_capacity,
    hourly_equipment_cost,
    load_tech_params,
    locomotive_hourly,
    range_per_tender,
    stop_time,
)
from .market_pipeline import (
    AggregateStats,
    BatchResult,
    MarketRecord,
    ScenarioSpec,
    aggregate,
    compare_diesel,
    ingest_markets,
    optimize_market,
    run_batch,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
