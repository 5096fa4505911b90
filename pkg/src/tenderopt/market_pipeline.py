"""Batch optimization of tender configurations across many freight markets.

Ingests market records from CSV, derives per-market model parameters from
the technology tables, optimizes each market under one or more scenarios
(capital included/excluded, scaled delay costs, charger power or battery
swap), compares against the diesel baseline, and aggregates descriptive
statistics by commodity group. Markets are independent work units; results
are always emitted in input order so runs are byte-reproducible.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .core_model import SimpleModelParams
from .errors import ConsistencyError, DomainError, IngestError
from .general_model import (
    GeneralModelParams,
    cost_attribution,
    optimal_n_general,
    total_cost_general,
)
from .oracles import integer_scan
from .techno_params import (
    CommodityEnergyTable,
    DelayCostBands,
    DieselBaseline,
    TechInputs,
    battery_hourly,
    charge_cost_per_stop,
    default_delay_bands,
    default_energy_table,
    delay_cost_lookup,
    diesel_baseline,
    locomotive_hourly,
    nominal_trip_time,
    range_per_tender,
    stop_time,
)

__all__ = [
    "MarketRecord",
    "ScenarioSpec",
    "BatchResult",
    "AggregateStats",
    "DieselComparison",
    "CSV_COLUMNS",
    "RESULT_COLUMNS",
    "METRICS",
    "ingest_markets",
    "market_model",
    "optimize_market",
    "sweep",
    "aggregate",
    "compare_diesel",
    "run_batch",
    "write_results_csv",
    "write_aggregates_json",
    "input_checksum",
    "default_gross_tons",
    "train_type_for",
]

CSV_COLUMNS = [
    "market_id", "railroad", "region", "commodity_group", "distance_mi",
    "annual_demand_cars", "train_length_cars", "num_locomotives", "speed_mph",
    "t0_h", "alpha", "gross_tons", "h_override",
]

RESULT_COLUMNS = [
    "market_id", "commodity_group", "region", "scenario", "feasible", "reason",
    "tenders", "per_locomotive", "n_continuous", "range_mi", "stops_per_1000mi",
    "trip_h", "cost_locomotive", "cost_battery", "cost_charging", "cost_delay",
    "total_cost", "share_locomotive_pct", "share_battery_pct",
    "share_charging_pct", "share_delay_pct",
]

METRICS = [
    "per_locomotive", "range_mi", "stops_per_1000mi", "share_locomotive_pct",
    "share_battery_pct", "share_charging_pct", "share_delay_pct",
]

STATISTICS = ["mean", "std", "p25", "median", "p75"]

# Per-locomotive gross tonnage basis behind the tender-range derivation.
_GROSS_TONS_DEFAULT = 1600.0
_GROSS_TONS_BY_COMMODITY = {"coal": 2540.0}

# Which delay-cost band applies to each commodity group. Commodities moving
# in dedicated unit trains take the unit rate; intermodal has its own; the
# rest ride manifest trains. A market's h_override column escapes this.
_TRAIN_TYPE_BY_COMMODITY = {
    "agricultural and foods": "unit",
    "chemical and petroleum": "unit",
    "coal": "unit",
    "motor vehicles": "unit",
    "intermodal": "intermodal",
    "forest products": "manifest",
    "metals and ores": "manifest",
    "nonmetallic products": "manifest",
    "others": "manifest",
}


def _canon(label: str) -> str:
    return " ".join(label.strip().lower().replace("&", "and").split())


def default_gross_tons(commodity_group: str) -> float:
    return _GROSS_TONS_BY_COMMODITY.get(_canon(commodity_group), _GROSS_TONS_DEFAULT)


def train_type_for(commodity_group: str) -> str:
    return _TRAIN_TYPE_BY_COMMODITY.get(_canon(commodity_group), "manifest")


@dataclass(frozen=True)
class MarketRecord:
    """One origin-destination / railroad / commodity market."""

    market_id: str
    railroad: str
    region: str
    commodity_group: str
    distance_mi: float
    annual_demand_cars: float
    train_length_cars: float
    locomotives: int
    alpha: float                        # loaded-car equivalents per tender
    speed_mph: float | None = None
    t0_h: float | None = None
    gross_tons: float | None = None
    h_override: float | None = None
    origin: str = ""
    destination: str = ""

    def __post_init__(self):
        if (self.speed_mph is None) == (self.t0_h is None):
            raise DomainError(
                f"market {self.market_id}: exactly one of speed_mph and t0_h "
                f"must be provided"
            )


@dataclass(frozen=True)
class ScenarioSpec:
    """One scenario variant applied uniformly to every market.

    ``charger_power_mw`` and ``swap_h`` are mutually exclusive; both unset
    means the technology file's charger. ``capital_costs`` = "excluded"
    zeroes the hourly equipment rates, leaving energy as the only dispatch
    cost.
    """

    capital_costs: str = "included"
    delay_factor: float = 1.0
    charger_power_mw: float | None = None
    swap_h: float | None = None
    carbon_price: float | None = None

    def __post_init__(self):
        if self.capital_costs not in ("included", "excluded"):
            raise DomainError(f"capital_costs must be included or excluded, "
                              f"got {self.capital_costs!r}")
        if not (math.isfinite(self.delay_factor) and self.delay_factor > 0.0):
            raise DomainError(f"delay_factor must be positive, got {self.delay_factor}")
        if self.charger_power_mw is not None and self.swap_h is not None:
            raise DomainError("specify either charger power or swap time, not both")

    @property
    def label(self) -> str:
        if self.swap_h is not None:
            charging = f"swap:{self.swap_h}h"
        elif self.charger_power_mw is not None:
            charging = f"{self.charger_power_mw}MW"
        else:
            charging = "default"
        parts = [f"capital={self.capital_costs}", f"delay={self.delay_factor}",
                 f"charging={charging}"]
        if self.carbon_price is not None:
            parts.append(f"carbon={self.carbon_price}")
        return ";".join(parts)


@dataclass(frozen=True)
class BatchResult:
    """Optimized configuration for one market under one scenario."""

    market_id: str
    commodity_group: str
    region: str
    scenario: str
    feasible: bool
    reason: str = ""
    tenders: int = 0
    per_locomotive: int = 0
    n_continuous: float = math.nan
    range_mi: float = math.nan
    stops_per_1000mi: float = math.nan
    trip_h: float = math.nan
    cost_locomotive: float = math.nan
    cost_battery: float = math.nan
    cost_charging: float = math.nan
    cost_delay: float = math.nan
    total_cost: float = math.nan
    share_locomotive_pct: float = math.nan
    share_battery_pct: float = math.nan
    share_charging_pct: float = math.nan
    share_delay_pct: float = math.nan


# ------------------------------------------------------------------- ingest

_REQUIRED = ["market_id", "railroad", "region", "commodity_group", "distance_mi",
             "annual_demand_cars", "train_length_cars", "num_locomotives", "alpha"]
_POSITIVE = ["distance_mi", "annual_demand_cars", "train_length_cars",
             "num_locomotives", "alpha"]


def _parse_float(row_no: int, column: str, cell: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise IngestError(row_no, column, f"unparseable number {cell!r}") from None
    if not math.isfinite(value):
        raise IngestError(row_no, column, f"non-finite number {cell!r}")
    return value


def ingest_markets(path) -> list[MarketRecord]:
    """Read and validate a market CSV; raises IngestError with the row and
    column of the first violation. Record order follows file order."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise IngestError(1, "header", "empty file")
        missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise IngestError(1, missing[0], "missing column")
        records = []
        for row_no, row in enumerate(reader, start=2):
            for column in _REQUIRED:
                if not (row[column] or "").strip():
                    raise IngestError(row_no, column, "required cell is empty")
            values = {c: _parse_float(row_no, c, row[c]) for c in _POSITIVE}
            for column in _POSITIVE:
                if values[column] <= 0.0:
                    raise IngestError(row_no, column, f"must be positive, got {values[column]}")
            optional = {}
            for column in ("speed_mph", "t0_h", "gross_tons", "h_override"):
                cell = (row[column] or "").strip()
                optional[column] = _parse_float(row_no, column, cell) if cell else None
            if (optional["speed_mph"] is None) == (optional["t0_h"] is None):
                raise IngestError(
                    row_no, "speed_mph",
                    "exactly one of speed_mph and t0_h must be present",
                )
            region = row["region"].strip()
            if _canon(region) not in ("western", "eastern"):
                raise IngestError(row_no, "region", f"must be Western or Eastern, got {region!r}")
            records.append(MarketRecord(
                market_id=row["market_id"].strip(),
                railroad=row["railroad"].strip(),
                region=region,
                commodity_group=row["commodity_group"].strip(),
                distance_mi=values["distance_mi"],
                annual_demand_cars=values["annual_demand_cars"],
                train_length_cars=values["train_length_cars"],
                locomotives=int(values["num_locomotives"]),
                alpha=values["alpha"],
                speed_mph=optional["speed_mph"],
                t0_h=optional["t0_h"],
                gross_tons=optional["gross_tons"],
                h_override=optional["h_override"],
            ))
    return records


# ----------------------------------------------------------------- optimize

def market_model(record: MarketRecord, tech: TechInputs, scenario: ScenarioSpec,
                 table: CommodityEnergyTable | None = None,
                 bands: DelayCostBands | None = None) -> GeneralModelParams:
    """Derive the cost-model parameters for one market under a scenario.

    The tender range comes from the commodity energy intensity on a
    per-locomotive tonnage basis, so the train-level range per tender is the
    per-locomotive range divided by the locomotive count.
    """
    table = table or default_energy_table()
    if scenario.carbon_price is not None:
        tech = replace(tech, carbon_price=scenario.carbon_price)
    if scenario.charger_power_mw is not None:
        tech = replace(tech, charger_power=scenario.charger_power_mw)

    gross = record.gross_tons if record.gross_tons is not None \
        else default_gross_tons(record.commodity_group)
    per_loco_range = range_per_tender(tech, table, record.commodity_group,
                                      record.region, gross)
    if record.t0_h is not None:
        t0 = record.t0_h
    else:
        t0 = nominal_trip_time(tech, record.distance_mi, record.speed_mph)
    if record.h_override is not None:
        holding = record.h_override
    else:
        holding = delay_cost_lookup(train_type_for(record.commodity_group),
                                    record.distance_mi, bands)
    holding *= scenario.delay_factor

    base = SimpleModelParams(
        distance_mi=record.distance_mi,
        base_trip_h=t0,
        train_length=record.train_length_cars,
        annual_demand=record.annual_demand_cars,
        tender_range_mi=per_loco_range / record.locomotives,
        weight_ratio=record.alpha,
        holding_cost=holding,
        stop_h=stop_time(tech, swap_h=scenario.swap_h),
        dispatch_cost=0.0,
    )
    if scenario.capital_costs == "excluded":
        loco_rate = tender_rate = 0.0
    else:
        loco_rate, tender_rate = locomotive_hourly(tech), battery_hourly(tech)
    return GeneralModelParams(
        base=base,
        locomotives=record.locomotives,
        loco_hourly=loco_rate,
        tender_hourly=tender_rate,
        stop_energy_cost=charge_cost_per_stop(tech),
    )


def optimize_market(record: MarketRecord, tech: TechInputs, scenario: ScenarioSpec,
                    table: CommodityEnergyTable | None = None,
                    bands: DelayCostBands | None = None) -> BatchResult:
    """Optimize one market; infeasible markets come back flagged, not raised."""
    try:
        params = market_model(record, tech, scenario, table, bands)
        optimum = optimal_n_general(params, multiple=record.locomotives)
    except DomainError as exc:
        return BatchResult(
            market_id=record.market_id,
            commodity_group=record.commodity_group,
            region=record.region,
            scenario=scenario.label,
            feasible=False,
            reason=str(exc),
        )
    attribution = cost_attribution(params, float(optimum.tenders))
    total = sum(attribution.values())
    shares = {key: 100.0 * value / total for key, value in attribution.items()}
    return BatchResult(
        market_id=record.market_id,
        commodity_group=record.commodity_group,
        region=record.region,
        scenario=scenario.label,
        feasible=True,
        tenders=optimum.tenders,
        per_locomotive=optimum.per_group,
        n_continuous=optimum.continuous,
        range_mi=optimum.evaluation.range_mi,
        stops_per_1000mi=optimum.evaluation.stops_continuous * 1000.0 / record.distance_mi,
        trip_h=optimum.evaluation.trip_h,
        cost_locomotive=attribution["locomotive"],
        cost_battery=attribution["battery"],
        cost_charging=attribution["charging"],
        cost_delay=attribution["delay"],
        total_cost=total,
        share_locomotive_pct=shares["locomotive"],
        share_battery_pct=shares["battery"],
        share_charging_pct=shares["charging"],
        share_delay_pct=shares["delay"],
    )


def _audit_result(record: MarketRecord, tech: TechInputs, scenario: ScenarioSpec,
                  result: BatchResult, table, bands) -> None:
    """Cross-check one optimized market against an exhaustive integer scan."""
    params = market_model(record, tech, scenario, table, bands)
    expected = integer_scan(
        lambda n: total_cost_general(params, n).total_cost,
        params.base.train_length, params.base.weight_ratio, record.locomotives,
    )
    if expected != result.tenders:
        raise ConsistencyError(
            f"market {record.market_id} ({scenario.label}): optimizer chose "
            f"{result.tenders} tenders but the exhaustive scan found {expected}"
        )


def sweep(records: Sequence[MarketRecord], tech: TechInputs,
          scenarios: Sequence[ScenarioSpec],
          table: CommodityEnergyTable | None = None,
          bands: DelayCostBands | None = None,
          audit_fraction: float = 0.0,
          audit_seed: int = 0) -> list[BatchResult]:
    """Evaluate every record under every scenario (record-major order).

    A bad market flags its own rows and never aborts the batch. With
    ``audit_fraction`` > 0 a deterministic random sample of feasible results
    is re-optimized by exhaustive scan; any disagreement raises.
    """
    if not scenarios:
        raise DomainError("empty scenario grid")
    table = table or default_energy_table()
    bands = bands or default_delay_bands()
    results: list[BatchResult] = []
    audit_jobs: list[tuple[MarketRecord, ScenarioSpec, BatchResult]] = []
    for record in records:
        for scenario in scenarios:
            result = optimize_market(record, tech, scenario, table, bands)
            results.append(result)
            if result.feasible:
                audit_jobs.append((record, scenario, result))
    if audit_fraction > 0.0 and audit_jobs:
        rng = np.random.RandomState(audit_seed)
        count = max(1, int(round(audit_fraction * len(audit_jobs))))
        for idx in rng.choice(len(audit_jobs), size=min(count, len(audit_jobs)),
                              replace=False):
            record, scenario, result = audit_jobs[idx]
            _audit_result(record, tech, scenario, result, table, bands)
    return results


# ---------------------------------------------------------------- aggregate

@dataclass(frozen=True)
class AggregateStats:
    """Descriptive statistics per commodity group and metric.

    ``groups[commodity][metric]`` holds mean, population std, and the
    linearly interpolated 25th/50th/75th percentiles. Infeasible markets are
    excluded from the statistics but counted and listed.
    """

    groups: Mapping[str, Mapping[str, Mapping[str, float]]]
    feasible_counts: Mapping[str, int]
    infeasible: tuple[str, ...]
    notices: tuple[str, ...]


def _stats(values: list[float]) -> dict[str, float]:
    # Sorting first makes every statistic invariant to input permutation,
    # including the floating-point mean.
    data = np.sort(np.asarray(values, dtype=float))
    p25, p50, p75 = np.percentile(data, [25.0, 50.0, 75.0], method="linear")
    return {
        "mean": float(np.mean(data)),
        "std": float(np.std(data)),
        "p25": float(p25),
        "median": float(p50),
        "p75": float(p75),
    }


def aggregate(results: Iterable[BatchResult]) -> AggregateStats:
    """Aggregate one scenario's results by commodity group."""
    by_group: dict[str, list[BatchResult]] = {}
    infeasible: list[str] = []
    notices: list[str] = []
    seen_groups: list[str] = []
    for result in results:
        group = result.commodity_group
        if group not in by_group:
            by_group[group] = []
            seen_groups.append(group)
        if not result.feasible:
            infeasible.append(result.market_id)
            continue
        share_sum = (result.share_locomotive_pct + result.share_battery_pct
                     + result.share_charging_pct + result.share_delay_pct)
        if abs(share_sum - 100.0) > 0.01:
            raise ConsistencyError(
                f"market {result.market_id}: cost shares sum to {share_sum}, not 100"
            )
        by_group[group].append(result)
    groups: dict[str, dict[str, dict[str, float]]] = {}
    counts: dict[str, int] = {}
    for group in sorted(seen_groups):
        rows = by_group[group]
        if not rows:
            notices.append(f"commodity group {group!r} has no feasible markets; omitted")
            continue
        counts[group] = len(rows)
        groups[group] = {
            metric: _stats([getattr(row, metric) for row in rows])
            for metric in METRICS
        }
    return AggregateStats(
        groups=groups,
        feasible_counts=counts,
        infeasible=tuple(infeasible),
        notices=tuple(notices),
    )


# ------------------------------------------------------------------- diesel

@dataclass(frozen=True)
class DieselComparison:
    """Battery-optimal costs next to the diesel baseline for one market.

    ``battery_financial`` is locomotive + battery + charging (no holding
    cost); the diesel total is locomotive + fuel and carries no delay term.
    """

    market_id: str
    battery: BatchResult
    battery_financial: float
    diesel: DieselBaseline
    battery_cheaper_financial: bool
    battery_cheaper_total: bool


def compare_diesel(record: MarketRecord, tech: TechInputs,
                   scenario: ScenarioSpec | None = None,
                   table: CommodityEnergyTable | None = None,
                   bands: DelayCostBands | None = None) -> DieselComparison:
    scenario = scenario or ScenarioSpec()
    table = table or default_energy_table()
    result = optimize_market(record, tech, scenario, table, bands)
    if not result.feasible:
        raise DomainError(f"market {record.market_id} is infeasible: {result.reason}")
    gross = record.gross_tons if record.gross_tons is not None \
        else default_gross_tons(record.commodity_group)
    baseline = diesel_baseline(record, table, tech, gross_tons=gross)
    financial = result.cost_locomotive + result.cost_battery + result.cost_charging
    return DieselComparison(
        market_id=record.market_id,
        battery=result,
        battery_financial=financial,
        diesel=baseline,
        battery_cheaper_financial=financial < baseline.total_cost,
        battery_cheaper_total=result.total_cost < baseline.total_cost,
    )


# ------------------------------------------------------------------ outputs

def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def input_checksum(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_results_csv(path, results: Sequence[BatchResult],
                      metadata: Mapping[str, str]) -> None:
    """Results CSV: '#' metadata lines, then a header row, one row per
    market x scenario. Floats are written with full round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        for key in sorted(metadata):
            handle.write(f"# {key}: {metadata[key]}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for result in results:
            writer.writerow([_cell(getattr(result, column)) for column in RESULT_COLUMNS])


def write_aggregates_json(path, stats_by_scenario: Mapping[str, AggregateStats],
                          metadata: Mapping[str, str]) -> None:
    payload = {
        "metadata": dict(metadata),
        "statistics": STATISTICS,
        "metrics": METRICS,
        "percentile_rule": "linear interpolation between order statistics",
        "scenarios": {
            label: {
                "groups": {g: dict(m) for g, m in stats.groups.items()},
                "feasible_counts": dict(stats.feasible_counts),
                "infeasible_markets": list(stats.infeasible),
                "notices": list(stats.notices),
            }
            for label, stats in stats_by_scenario.items()
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


@dataclass(frozen=True)
class BatchSummary:
    markets: int
    scenarios: int
    infeasible: int
    results_path: str
    aggregates_path: str


def run_batch(markets_path, out_dir, tech: TechInputs,
              scenarios: Sequence[ScenarioSpec],
              audit_fraction: float = 0.01) -> BatchSummary:
    """Ingest, optimize, aggregate, and write both output files."""
    records = ingest_markets(markets_path)
    results = sweep(records, tech, scenarios, audit_fraction=audit_fraction)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    metadata = {
        "tool_version": __version__,
        "input_sha256": input_checksum(markets_path),
        "scenarios": " | ".join(s.label for s in scenarios),
    }
    results_path = out / "results.csv"
    aggregates_path = out / "aggregates.json"
    write_results_csv(results_path, results, metadata)
    stats = {
        scenario.label: aggregate([r for r in results if r.scenario == scenario.label])
        for scenario in scenarios
    }
    write_aggregates_json(aggregates_path, stats, metadata)
    infeasible = sum(1 for r in results if not r.feasible)
    return BatchSummary(
        markets=len(records),
        scenarios=len(scenarios),
        infeasible=infeasible,
        results_path=str(results_path),
        aggregates_path=str(aggregates_path),
    )
