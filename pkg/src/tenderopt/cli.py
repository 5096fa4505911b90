"""Command-line interface.

Subcommands: optimize, curve, batch, sweep, compare-diesel, derive. The CLI
only formats values produced by the library; every printed number is the
library value rendered with full round-trip precision, so table, CSV, and
JSON output of the same run carry identical values.

Exit codes: 0 success, 2 validation error, 3 I/O error. Technology
parameters resolve as defaults < parameter file (--params or the
TENDEROPT_PARAMS environment variable) < command-line flags.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import __version__
from .core_model import SimpleModelParams, feasible_multiple_max
from .errors import DomainError, IngestError
from .general_model import (
    GeneralModelParams,
    optimal_n_general,
    total_cost_general,
)
from .market_pipeline import (
    MarketRecord,
    ScenarioSpec,
    compare_diesel,
    default_gross_tons,
    ingest_markets,
    market_model,
    run_batch,
)
from .techno_params import (
    TechInputs,
    battery_hourly,
    charge_cost_per_stop,
    default_energy_table,
    effective_capacity,
    load_tech_params,
    locomotive_hourly,
    range_per_tender,
    stop_time,
)

_COMMODITIES = ["Agricultural & Foods", "Chemical & Petroleum", "Coal",
                "Forest Products", "Intermodal", "Metals & Ores",
                "Motor Vehicles", "Nonmetallic Products", "Others"]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _load_tech(args) -> TechInputs:
    path = args.params or os.environ.get("TENDEROPT_PARAMS")
    tech = load_tech_params(path) if path else TechInputs()
    if getattr(args, "charger_power_mw", None) is not None:
        tech = dataclasses.replace(tech, charger_power=args.charger_power_mw)
    if getattr(args, "carbon_price", None) is not None:
        tech = dataclasses.replace(tech, carbon_price=args.carbon_price)
    return tech


def _scenario(args) -> ScenarioSpec:
    return ScenarioSpec(
        capital_costs=getattr(args, "capital", "included"),
        delay_factor=getattr(args, "delay_factor", 1.0),
        charger_power_mw=getattr(args, "charger_power_mw", None),
        swap_h=getattr(args, "swap_h", None),
        carbon_price=getattr(args, "carbon_price", None),
    )


def _pick_format(args) -> str:
    if args.format != "auto":
        return args.format
    return "table" if sys.stdout.isatty() else "csv"


def _emit_mapping(report: dict, fmt: str) -> None:
    """Print a (possibly nested) mapping as aligned text, JSON, or key,value CSV."""
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    flat: list[tuple[str, str]] = []

    def walk(prefix: str, node) -> None:
        if isinstance(node, dict):
            for key, value in node.items():
                walk(f"{prefix}.{key}" if prefix else key, value)
        else:
            flat.append((prefix, _fmt(node)))

    walk("", report)
    if fmt == "csv":
        print("key,value")
        for key, value in flat:
            print(f"{key},{value}")
    else:
        width = max(len(key) for key, _ in flat)
        for key, value in flat:
            print(f"{key:<{width}}  {value}")


def _emit_rows(columns: list[str], rows: list[dict], fmt: str,
               preamble: dict | None = None) -> None:
    if fmt == "json":
        print(json.dumps({"metadata": preamble or {}, "rows": rows},
                         indent=2, sort_keys=True))
        return
    cells = [[_fmt(row[column]) for column in columns] for row in rows]
    if fmt == "csv":
        for key, value in (preamble or {}).items():
            print(f"# {key}: {_fmt(value)}")
        print(",".join(columns))
        for row in cells:
            print(",".join(row))
    else:
        widths = [max(len(column), *(len(row[i]) for row in cells)) if cells else len(column)
                  for i, column in enumerate(columns)]
        print("  ".join(column.ljust(width) for column, width in zip(columns, widths)))
        for row in cells:
            print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)))


# ----------------------------------------------------------- market building

def _market_from_args(args, tech) -> GeneralModelParams:
    """Build model parameters from direct flags (per-locomotive range basis)."""
    required = ["distance_mi", "train_length", "annual_demand", "alpha",
                "tender_range_mi", "holding_cost"]
    missing = [name for name in required if getattr(args, name) is None]
    if missing:
        raise DomainError("missing required flag(s): "
                          + ", ".join("--" + name.replace("_", "-") for name in missing))
    if (args.t0_h is None) == (args.speed_mph is None):
        raise DomainError("exactly one of --t0-h and --speed-mph is required")
    t0 = args.t0_h if args.t0_h is not None else \
        args.distance_mi / args.speed_mph + tech.initial_stop_h
    scenario = _scenario(args)
    base = SimpleModelParams(
        distance_mi=args.distance_mi,
        base_trip_h=t0,
        train_length=args.train_length,
        annual_demand=args.annual_demand,
        tender_range_mi=args.tender_range_mi / args.locomotives,
        weight_ratio=args.alpha,
        holding_cost=args.holding_cost * scenario.delay_factor,
        stop_h=args.stop_h if args.stop_h is not None
        else stop_time(tech, swap_h=args.swap_h),
        dispatch_cost=0.0,
    )
    if scenario.capital_costs == "excluded":
        loco_rate = tender_rate = 0.0
    else:
        loco_rate = args.loco_hourly if args.loco_hourly is not None else locomotive_hourly(tech)
        tender_rate = args.tender_hourly if args.tender_hourly is not None else battery_hourly(tech)
    energy = args.stop_energy_cost if args.stop_energy_cost is not None \
        else charge_cost_per_stop(tech)
    return GeneralModelParams(
        base=base,
        locomotives=args.locomotives,
        loco_hourly=loco_rate,
        tender_hourly=tender_rate,
        stop_energy_cost=energy,
    )


def _evaluation_row(params: GeneralModelParams, n: int) -> dict:
    ev = total_cost_general(params, float(n))
    comp = ev.cost_components
    return {
        "tenders": n,
        "per_locomotive": n / params.locomotives,
        "payload_cars": ev.payload,
        "range_mi": ev.range_mi,
        "stops": ev.stops_practical,
        "stops_continuous": ev.stops_continuous,
        "trip_h": ev.trip_h,
        "cost_locomotive": comp["locomotive"],
        "cost_tender": comp["tender"],
        "cost_charging": comp["charging"],
        "cost_delay": comp["delay"],
        "cost_constant": comp["constant"],
        "total_cost": ev.total_cost,
    }


_CURVE_COLUMNS = ["tenders", "per_locomotive", "payload_cars", "range_mi", "stops",
                  "stops_continuous", "trip_h", "cost_locomotive", "cost_tender",
                  "cost_charging", "cost_delay", "cost_constant", "total_cost"]


def _tech_echo(tech: TechInputs) -> dict:
    return {name: getattr(tech, name) for name in tech.__dataclass_fields__}


# ------------------------------------------------------------------ commands

def _record_from_file(args) -> MarketRecord:
    records = {r.market_id: r for r in ingest_markets(args.markets)}
    if args.market_id not in records:
        raise DomainError(f"market {args.market_id!r} not found in {args.markets}")
    return records[args.market_id]


def cmd_optimize(args) -> int:
    tech = _load_tech(args)
    if args.markets:
        if not args.market_id:
            raise DomainError("--markets requires --market-id")
        params = market_model(_record_from_file(args), tech, _scenario(args))
    else:
        params = _market_from_args(args, tech)
    per_train = optimal_n_general(params, multiple=1)
    per_loco = optimal_n_general(params, multiple=params.locomotives)
    chosen = per_loco if args.granularity == "per-locomotive" else per_train
    report = {
        "continuous": {
            "tenders": chosen.continuous,
            "boundary": chosen.boundary or "interior",
            "range_mi": chosen.continuous * params.base.tender_range_mi,
        },
        "per_train": _evaluation_row(params, per_train.tenders),
        "per_locomotive": _evaluation_row(params, per_loco.tenders),
        "optimum": _evaluation_row(params, chosen.tenders),
        "scenario": _scenario(args).label,
        "tech": _tech_echo(tech),
    }
    _emit_mapping(report, _pick_format(args))
    return 0


def cmd_curve(args) -> int:
    tech = _load_tech(args)
    params = _market_from_args(args, tech)
    m_max = feasible_multiple_max(params.base, params.locomotives)
    lo = args.m_from if args.m_from is not None else 1
    hi = args.m_to if args.m_to is not None else m_max
    if not 1 <= lo <= hi <= m_max:
        raise DomainError(f"tender-group range {lo}..{hi} outside feasible 1..{m_max}")
    rows = [_evaluation_row(params, m * params.locomotives) for m in range(lo, hi + 1)]
    _emit_rows(_CURVE_COLUMNS, rows, _pick_format(args),
               preamble={"scenario": _scenario(args).label, "tool_version": __version__})
    return 0


def _scenario_grid(args) -> list[ScenarioSpec]:
    factors = [float(x) for x in args.delay_factors.split(",")] if args.delay_factors else [1.0]
    capitals = args.capital.split(",") if args.capital else ["included"]
    chargings: list[tuple[float | None, float | None]] = []
    if args.charging:
        for token in args.charging.split(","):
            token = token.strip()
            if token.startswith("swap:"):
                chargings.append((None, float(token[len("swap:"):])))
            else:
                chargings.append((float(token), None))
    else:
        chargings = [(None, None)]
    grid = []
    for capital in capitals:
        for factor in factors:
            for power, swap in chargings:
                grid.append(ScenarioSpec(
                    capital_costs=capital.strip(),
                    delay_factor=factor,
                    charger_power_mw=power,
                    swap_h=swap,
                    carbon_price=args.carbon_price,
                ))
    return grid


def _run_and_summarize(args, scenarios: list[ScenarioSpec]) -> int:
    tech = _load_tech(args)
    summary = run_batch(args.markets, args.out_dir, tech, scenarios,
                        audit_fraction=args.audit_fraction)
    print(f"markets processed: {summary.markets}")
    print(f"scenarios:         {summary.scenarios}")
    print(f"infeasible rows:   {summary.infeasible}")
    print(f"results:           {summary.results_path}")
    print(f"aggregates:        {summary.aggregates_path}")
    return 0


def cmd_batch(args) -> int:
    return _run_and_summarize(args, [_scenario(args)])


def cmd_sweep(args) -> int:
    return _run_and_summarize(args, _scenario_grid(args))


def cmd_compare_diesel(args) -> int:
    tech = _load_tech(args)
    if args.markets:
        record = _record_from_file(args)
    else:
        required = ["distance_mi", "train_length", "annual_demand", "alpha",
                    "commodity", "region"]
        missing = [n for n in required if getattr(args, n) is None]
        if missing:
            raise DomainError("missing required flag(s): "
                              + ", ".join("--" + n.replace("_", "-") for n in missing))
        record = MarketRecord(
            market_id=args.market_id or "cli",
            railroad=args.railroad or "",
            region=args.region,
            commodity_group=args.commodity,
            distance_mi=args.distance_mi,
            annual_demand_cars=args.annual_demand,
            train_length_cars=args.train_length,
            locomotives=args.locomotives,
            alpha=args.alpha,
            speed_mph=args.speed_mph,
            t0_h=args.t0_h,
            gross_tons=args.gross_tons,
            h_override=args.holding_cost,
        )
    comparison = compare_diesel(record, tech, _scenario(args))
    report = {
        "market_id": comparison.market_id,
        "battery": {
            "per_locomotive": comparison.battery.per_locomotive,
            "tenders": comparison.battery.tenders,
            "range_mi": comparison.battery.range_mi,
            "trip_h": comparison.battery.trip_h,
            "cost_locomotive": comparison.battery.cost_locomotive,
            "cost_battery": comparison.battery.cost_battery,
            "cost_charging": comparison.battery.cost_charging,
            "cost_delay": comparison.battery.cost_delay,
            "financial_cost": comparison.battery_financial,
            "total_cost": comparison.battery.total_cost,
        },
        "diesel": {
            "trips_per_year": comparison.diesel.trips_per_year,
            "trip_h": comparison.diesel.trip_h,
            "gallons": comparison.diesel.gallons,
            "fuel_cost": comparison.diesel.fuel_cost,
            "cost_locomotive": comparison.diesel.locomotive_cost,
            "total_cost": comparison.diesel.total_cost,
        },
        "battery_cheaper_financial": comparison.battery_cheaper_financial,
        "battery_cheaper_total": comparison.battery_cheaper_total,
    }
    _emit_mapping(report, _pick_format(args))
    return 0


def cmd_derive(args) -> int:
    tech = _load_tech(args)
    cap, depth, eff = tech.battery_capacity, tech.charging_depth, tech.battery_efficiency
    kwh = cap * depth * 1000.0
    maintenance = tech.battery_maintenance * 365.0
    lines = [
        ("effective_capacity_mwh", effective_capacity(tech),
         f"{cap} MWh x {depth} depth x {eff} efficiency"),
        ("stop_time_h", stop_time(tech),
         f"{cap} MWh x {depth} / {tech.charger_power} MW"),
        ("charge_cost_per_stop_usd", charge_cost_per_stop(tech),
         f"{kwh} kWh x {tech.electricity_price} USD/kWh + {kwh} kWh x "
         f"{tech.grid_intensity} kg/kWh x {tech.carbon_price}/1000 USD/kg"),
        ("locomotive_hourly_usd", locomotive_hourly(tech),
         f"{tech.loco_annual_total_cost} USD/yr / ({tech.loco_utilization} x 8760 h)"),
        ("battery_hourly_usd", battery_hourly(tech),
         f"EUAC({tech.battery_capital} capital + {tech.battery_future_capital} "
         f"replacement every {tech.battery_lifetime} yr + {maintenance} USD/yr "
         f"maintenance, {tech.discount_rate}/yr over {tech.horizon} yr) "
         f"/ ({tech.loco_utilization} x 8760 h)"),
    ]
    table = default_energy_table()
    region = args.region or "Western"
    for commodity in _COMMODITIES:
        tons = args.gross_tons if args.gross_tons is not None else default_gross_tons(commodity)
        req = table.diesel_energy(commodity, region)
        lines.append((
            f"range_mi[{commodity}|{region}|{tons:g}t]",
            range_per_tender(tech, table, commodity, region, tons),
            f"{effective_capacity(tech) * 1000.0} kWh / ({req} BTU/ton-mi / "
            f"{tech.relative_efficiency} / 3412.14 x {tons:g} t)",
        ))
    fmt = _pick_format(args)
    if fmt == "json":
        print(json.dumps({name: {"value": value, "formula": formula}
                          for name, value, formula in lines}, indent=2, sort_keys=True))
    elif fmt == "csv":
        print("parameter,value,formula")
        for name, value, formula in lines:
            print(f'{name},{_fmt(value)},"{formula}"')
    else:
        for name, value, formula in lines:
            print(f"{name} = {formula} = {_fmt(value)}")
    return 0


# -------------------------------------------------------------------- parser

def _add_common(sub) -> None:
    sub.add_argument("--params", help="technology parameter file (key = value)")
    sub.add_argument("--format", choices=["auto", "table", "json", "csv"], default="auto")


def _add_scenario(sub) -> None:
    sub.add_argument("--capital", choices=["included", "excluded"], default="included")
    sub.add_argument("--delay-factor", dest="delay_factor", type=float, default=1.0)
    sub.add_argument("--charger-power-mw", dest="charger_power_mw", type=float)
    sub.add_argument("--swap-h", dest="swap_h", type=float)
    sub.add_argument("--carbon-price", dest="carbon_price", type=float)


def _add_market(sub) -> None:
    sub.add_argument("--distance-mi", dest="distance_mi", type=float)
    sub.add_argument("--t0-h", dest="t0_h", type=float)
    sub.add_argument("--speed-mph", dest="speed_mph", type=float)
    sub.add_argument("--train-length", dest="train_length", type=float)
    sub.add_argument("--annual-demand", dest="annual_demand", type=float)
    sub.add_argument("--alpha", dest="alpha", type=float,
                     help="loaded-car equivalents displaced per tender")
    sub.add_argument("--tender-range-mi", dest="tender_range_mi", type=float,
                     help="miles one tender adds per locomotive served")
    sub.add_argument("--holding-cost", dest="holding_cost", type=float,
                     help="USD per car-hour in transit")
    sub.add_argument("--locomotives", dest="locomotives", type=int, default=1)
    sub.add_argument("--stop-h", dest="stop_h", type=float,
                     help="override the derived time per stop")
    sub.add_argument("--stop-energy-cost", dest="stop_energy_cost", type=float,
                     help="override the derived USD per tender per stop")
    sub.add_argument("--loco-hourly", dest="loco_hourly", type=float)
    sub.add_argument("--tender-hourly", dest="tender_hourly", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tenderopt",
        description="Cost-optimal energy-storage tender car counts for freight trains.",
    )
    parser.add_argument("--version", action="version", version=f"tenderopt {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    opt = commands.add_parser("optimize",
                              help="optimize one market given by flags or a market file")
    _add_common(opt); _add_market(opt); _add_scenario(opt)
    opt.add_argument("--granularity", choices=["per-locomotive", "per-train"],
                     default="per-locomotive")
    opt.add_argument("--markets", help="market CSV (with --market-id)")
    opt.add_argument("--market-id", dest="market_id")
    opt.set_defaults(func=cmd_optimize)

    curve = commands.add_parser("curve", help="emit the cost-versus-tenders table")
    _add_common(curve); _add_market(curve); _add_scenario(curve)
    curve.add_argument("--m-from", dest="m_from", type=int)
    curve.add_argument("--m-to", dest="m_to", type=int)
    curve.set_defaults(func=cmd_curve)

    batch = commands.add_parser("batch", help="optimize a market CSV under one scenario")
    _add_common(batch); _add_scenario(batch)
    batch.add_argument("--markets", required=True)
    batch.add_argument("--out-dir", dest="out_dir", required=True)
    batch.add_argument("--audit-fraction", dest="audit_fraction", type=float, default=0.01)
    batch.set_defaults(func=cmd_batch)

    swp = commands.add_parser("sweep", help="optimize a market CSV over a scenario grid")
    _add_common(swp)
    swp.add_argument("--markets", required=True)
    swp.add_argument("--out-dir", dest="out_dir", required=True)
    swp.add_argument("--delay-factors", dest="delay_factors",
                     help="comma-separated delay cost multipliers")
    swp.add_argument("--charging", help="comma-separated charger powers in MW or swap:HOURS")
    swp.add_argument("--capital", help="comma-separated: included,excluded")
    swp.add_argument("--carbon-price", dest="carbon_price", type=float)
    swp.add_argument("--audit-fraction", dest="audit_fraction", type=float, default=0.01)
    swp.set_defaults(func=cmd_sweep)

    cd = commands.add_parser("compare-diesel",
                             help="battery-optimal costs against the diesel baseline")
    _add_common(cd); _add_market(cd); _add_scenario(cd)
    cd.add_argument("--markets", help="market CSV (with --market-id)")
    cd.add_argument("--market-id", dest="market_id")
    cd.add_argument("--commodity")
    cd.add_argument("--region", choices=["Western", "Eastern"])
    cd.add_argument("--railroad")
    cd.add_argument("--gross-tons", dest="gross_tons", type=float)
    cd.set_defaults(func=cmd_compare_diesel)

    derive = commands.add_parser("derive", help="print derived model rates with formulas")
    _add_common(derive)
    derive.add_argument("--region", choices=["Western", "Eastern"])
    derive.add_argument("--gross-tons", dest="gross_tons", type=float)
    derive.add_argument("--charger-power-mw", dest="charger_power_mw", type=float)
    derive.add_argument("--carbon-price", dest="carbon_price", type=float)
    derive.set_defaults(func=cmd_derive)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, IngestError, KeyError, ValueError) as exc:
        print(f"tenderopt: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tenderopt: io-error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
