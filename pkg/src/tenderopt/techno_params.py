"""Derives model rates from raw battery/locomotive/diesel technology inputs.

Covers effective battery capacity, charge stop time and cost, tender range
from commodity energy intensities, equivalent-uniform hourly equipment
costs under continuous discounting, per-car delay cost bands, and a diesel
operating baseline. Bundled defaults (2019 USD) live in ``data/``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Mapping

from .errors import DomainError, TableLookupError

__all__ = [
    "TechInputs",
    "CommodityEnergyTable",
    "DelayCostBands",
    "DieselBaseline",
    "BTU_PER_KWH",
    "HOURS_PER_YEAR",
    "effective_capacity",
    "stop_time",
    "charge_cost_per_stop",
    "range_per_tender",
    "hourly_equipment_cost",
    "hourly_cost_from_annual",
    "battery_hourly",
    "locomotive_hourly",
    "delay_cost_lookup",
    "nominal_trip_time",
    "diesel_baseline",
    "load_tech_params",
    "load_energy_table",
    "load_delay_bands",
    "default_energy_table",
    "default_delay_bands",
]

BTU_PER_KWH = 3412.14
HOURS_PER_YEAR = 8760.0
DAYS_PER_YEAR = 365.0


@dataclass(frozen=True)
class TechInputs:
    """Raw technology and finance inputs.

    Units: MWh, MW, tons, USD, years, fractions in (0, 1]. Defaults mirror
    the bundled ``data/default_params.txt``. ``battery_maintenance`` is per
    day; ``horizon`` must be a whole number of ``battery_lifetime`` periods
    so the replacement schedule is unambiguous.
    """

    battery_capacity: float = 14.0          # MWh
    charging_depth: float = 0.80            # fraction cycled per charge
    battery_efficiency: float = 0.95        # round-trip fraction
    charger_power: float = 3.0              # MW
    tender_weight: float = 150.0            # tons
    battery_capital: float = 1_271_816.0    # USD
    battery_future_capital: float = 452_908.0  # USD per replacement
    battery_maintenance: float = 100.0      # USD/day
    battery_lifetime: float = 13.0          # years
    discount_rate: float = 0.03             # 1/year
    horizon: float = 26.0                   # years
    electricity_price: float = 0.15         # USD/kWh
    grid_intensity: float = 0.387           # kg CO2-eq/kWh
    carbon_price: float = 125.0             # USD/ton CO2-eq
    loco_utilization: float = 0.25          # fraction of hours in road service
    loco_annual_total_cost: float = 516_000.0  # USD/year
    diesel_price: float = 2.47              # USD/gallon
    diesel_lhv: float = 129_488.0           # BTU/gallon
    diesel_emission: float = 12.36          # kg CO2-eq/gallon
    relative_efficiency: float = 2.44       # battery-electric vs diesel
    initial_stop_h: float = 4.0             # hours added to nominal trip time

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0) and name != "carbon_price":
                raise DomainError(f"{name} must be finite and positive, got {value}")
        if not math.isfinite(self.carbon_price) or self.carbon_price < 0.0:
            raise DomainError(f"carbon_price must be nonnegative, got {self.carbon_price}")
        for name in ("charging_depth", "battery_efficiency", "loco_utilization"):
            if getattr(self, name) > 1.0:
                raise DomainError(f"{name} must be a fraction in (0, 1]")


def _canon(label: str) -> str:
    return " ".join(label.strip().lower().replace("&", "and").split())


@dataclass(frozen=True)
class CommodityEnergyTable:
    """Diesel energy intensity by (commodity, region) and train speeds by
    (railroad, train type)."""

    energy_btu_per_ton_mile: Mapping[tuple[str, str], float]
    speeds_mph: Mapping[tuple[str, str], float]

    def diesel_energy(self, commodity: str, region: str) -> float:
        key = (_canon(commodity), _canon(region))
        try:
            return self.energy_btu_per_ton_mile[key]
        except KeyError:
            raise TableLookupError(key, self.energy_btu_per_ton_mile.keys()) from None

    def speed(self, railroad: str, train_type: str) -> float:
        key = (_canon(railroad), _canon(train_type))
        try:
            return self.speeds_mph[key]
        except KeyError:
            raise TableLookupError(key, self.speeds_mph.keys()) from None


@dataclass(frozen=True)
class DelayCostBands:
    """Per-car hourly delay cost by train type and trip-distance band.

    Bands are lower-exclusive / upper-inclusive on distance.
    """

    bands: Mapping[str, tuple[tuple[float, float, float], ...]]  # type -> (lo, hi, usd)

    def lookup(self, train_type: str, distance_mi: float) -> float:
        key = _canon(train_type)
        try:
            rows = self.bands[key]
        except KeyError:
            raise TableLookupError(key, self.bands.keys()) from None
        for lo, hi, usd in rows:
            if lo < distance_mi <= hi:
                return usd
        raise DomainError(f"distance {distance_mi} not covered by delay bands for {train_type!r}")


# ------------------------------------------------------------------ loaders

def _data_text(name: str) -> str:
    return resources.files("tenderopt").joinpath("data", name).read_text(encoding="utf-8")


def _parse_params_text(text: str) -> dict[str, float]:
    values: dict[str, float] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = float(value.strip())
    return values


def load_tech_params(path=None) -> TechInputs:
    """Load a ``key = value`` parameter file; missing keys keep defaults."""
    if path is None:
        text = _data_text("default_params.txt")
    else:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    values = _parse_params_text(text)
    known = set(TechInputs.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise DomainError(f"unknown parameter keys: {', '.join(sorted(unknown))}")
    return TechInputs(**values)


def _parse_csv_rows(text: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    header = [cell.strip() for cell in lines[0].split(",")]
    return header, [[cell.strip() for cell in ln.split(",")] for ln in lines[1:]]


def load_energy_table(energy_path=None, speeds_path=None) -> CommodityEnergyTable:
    """Load the commodity energy-intensity and train-speed tables."""
    energy_text = _data_text("energy_requirements.csv") if energy_path is None \
        else open(energy_path, encoding="utf-8").read()
    speed_text = _data_text("train_speeds.csv") if speeds_path is None \
        else open(speeds_path, encoding="utf-8").read()

    header, rows = _parse_csv_rows(energy_text)
    if header != ["commodity", "region", "btu_per_ton_mile"]:
        raise DomainError(f"unexpected energy table header: {header}")
    energy = {(_canon(c), _canon(r)): float(v) for c, r, v in rows}

    header, rows = _parse_csv_rows(speed_text)
    if header != ["railroad", "train_type", "mph"]:
        raise DomainError(f"unexpected speed table header: {header}")
    speeds = {(_canon(rr), _canon(tt)): float(v) for rr, tt, v in rows}
    return CommodityEnergyTable(energy, speeds)


def load_delay_bands(path=None) -> DelayCostBands:
    text = _data_text("delay_costs.csv") if path is None else open(path, encoding="utf-8").read()
    header, rows = _parse_csv_rows(text)
    if header != ["train_type", "min_mi", "max_mi", "usd_per_car_hour"]:
        raise DomainError(f"unexpected delay table header: {header}")
    bands: dict[str, list[tuple[float, float, float]]] = {}
    for train_type, lo, hi, usd in rows:
        upper = math.inf if hi.lower() in ("inf", "") else float(hi)
        bands.setdefault(_canon(train_type), []).append((float(lo), upper, float(usd)))
    return DelayCostBands({k: tuple(v) for k, v in bands.items()})


_DEFAULT_TABLE: CommodityEnergyTable | None = None
_DEFAULT_BANDS: DelayCostBands | None = None


def default_energy_table() -> CommodityEnergyTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = load_energy_table()
    return _DEFAULT_TABLE


def default_delay_bands() -> DelayCostBands:
    global _DEFAULT_BANDS
    if _DEFAULT_BANDS is None:
        _DEFAULT_BANDS = load_delay_bands()
    return _DEFAULT_BANDS


# --------------------------------------------------------------- derivations

def effective_capacity(tech: TechInputs) -> float:
    """Usable energy per tender in MWh: capacity derated by charging depth
    and battery efficiency."""
    return tech.battery_capacity * tech.charging_depth * tech.battery_efficiency


def stop_time(tech: TechInputs, swap_h: float | None = None) -> float:
    """Hours per stop: recharge time capacity*depth/power, or a fixed swap time."""
    if swap_h is not None:
        if swap_h < 0.0:
            raise DomainError(f"swap time must be nonnegative, got {swap_h}")
        return swap_h
    if tech.charger_power <= 0.0:
        raise DomainError("charger power must be positive in charge mode")
    return tech.battery_capacity * tech.charging_depth / tech.charger_power


def charge_cost_per_stop(tech: TechInputs, at_battery: bool = True) -> float:
    """USD per tender per stop: energy plus the carbon cost of grid emissions.

    ``at_battery`` bills the energy cycled at the battery terminals
    (capacity * depth); the grid-side alternative divides by battery
    efficiency to account for charging losses.
    """
    kwh = tech.battery_capacity * tech.charging_depth * 1000.0
    if not at_battery:
        kwh /= tech.battery_efficiency
    return kwh * tech.electricity_price + kwh * tech.grid_intensity * tech.carbon_price / 1000.0


def range_per_tender(tech: TechInputs, table: CommodityEnergyTable, commodity: str,
                     region: str, gross_tons: float) -> float:
    """Miles of range one tender provides when serving ``gross_tons`` of train.

    The battery energy intensity is the commodity's diesel intensity divided
    by the relative drivetrain efficiency, converted BTU -> kWh.
    """
    if gross_tons <= 0.0:
        raise DomainError(f"gross_tons must be positive, got {gross_tons}")
    diesel_req = table.diesel_energy(commodity, region)
    battery_req = diesel_req / tech.relative_efficiency / BTU_PER_KWH  # kWh/ton-mile
    return effective_capacity(tech) * 1000.0 / (battery_req * gross_tons)


def hourly_equipment_cost(capital: float, future_capital: float, maintenance: float,
                          lifetime: float, horizon: float, rate: float,
                          utilization: float) -> float:
    """Equivalent uniform hourly cost of an asset replaced every ``lifetime``
    years over ``horizon`` years, discounted as continuous cash flows.

    ``maintenance`` is USD/year. The horizon must be a whole number of
    lifetimes; replacements are purchased at t = lifetime, 2*lifetime, ...
    strictly inside the horizon. ``rate`` = 0 uses the undiscounted limit.
    """
    if rate < 0.0:
        raise DomainError(f"discount rate must be nonnegative, got {rate}")
    if not 0.0 < utilization <= 1.0:
        raise DomainError(f"utilization must be in (0, 1], got {utilization}")
    periods = horizon / lifetime
    if abs(periods - round(periods)) > 1e-9:
        raise DomainError(
            f"horizon {horizon} is not a whole number of {lifetime}-year lifetimes; "
            f"the replacement schedule would be ambiguous"
        )
    npv = capital
    for j in range(1, int(round(periods))):
        t = j * lifetime
        npv += future_capital * (math.exp(-rate * t) if rate > 0.0 else 1.0)
    if rate > 0.0:
        npv += maintenance * (1.0 - math.exp(-rate * horizon)) / rate
        annual = npv * rate / (1.0 - math.exp(-rate * horizon))
    else:
        npv += maintenance * horizon
        annual = npv / horizon
    return annual / (utilization * HOURS_PER_YEAR)


def hourly_cost_from_annual(annual_cost: float, utilization: float) -> float:
    """Annual cost spread over utilization-adjusted road-service hours."""
    if not 0.0 < utilization <= 1.0:
        raise DomainError(f"utilization must be in (0, 1], got {utilization}")
    return annual_cost / (utilization * HOURS_PER_YEAR)


def battery_hourly(tech: TechInputs) -> float:
    """Hourly equipment cost of one battery tender (USD/road-service hour)."""
    return hourly_equipment_cost(
        capital=tech.battery_capital,
        future_capital=tech.battery_future_capital,
        maintenance=tech.battery_maintenance * DAYS_PER_YEAR,
        lifetime=tech.battery_lifetime,
        horizon=tech.horizon,
        rate=tech.discount_rate,
        utilization=tech.loco_utilization,
    )


def locomotive_hourly(tech: TechInputs) -> float:
    """Hourly cost of one locomotive from its all-in annual cost."""
    return hourly_cost_from_annual(tech.loco_annual_total_cost, tech.loco_utilization)


def delay_cost_lookup(train_type: str, distance_mi: float,
                      bands: DelayCostBands | None = None) -> float:
    """Per-car hourly delay cost for a train type and trip distance."""
    if distance_mi <= 0.0:
        raise DomainError(f"distance must be positive, got {distance_mi}")
    return (bands or default_delay_bands()).lookup(train_type, distance_mi)


def nominal_trip_time(tech: TechInputs, distance_mi: float, speed_mph: float) -> float:
    """Nominal trip hours: running time at the given speed plus the initial stop."""
    if speed_mph <= 0.0:
        raise DomainError(f"speed must be positive, got {speed_mph}")
    return distance_mi / speed_mph + tech.initial_stop_h


@dataclass(frozen=True)
class DieselBaseline:
    """Annual diesel operating costs for one market: locomotives plus fuel
    (fuel priced with its combustion-emissions carbon cost)."""

    trips_per_year: float
    trip_h: float
    gallons: float
    fuel_cost: float
    locomotive_cost: float
    total_cost: float


def diesel_baseline(market, table: CommodityEnergyTable, tech: TechInputs,
                    gross_tons: float | None = None) -> DieselBaseline:
    """Diesel reference costs for a market record.

    ``market`` needs distance_mi, annual_demand_cars, train_length_cars,
    locomotives, commodity_group, region, and either t0_h or speed_mph.
    ``gross_tons`` is the per-locomotive tonnage basis (defaults to the
    record's value). Fuel burn is gross ton-miles times the commodity's
    diesel intensity; the full train carries revenue cars only.
    """
    tons = gross_tons if gross_tons is not None else getattr(market, "gross_tons", None)
    if tons is None or tons <= 0.0:
        raise DomainError("diesel baseline needs a positive gross_tons basis")
    trips = market.annual_demand_cars / market.train_length_cars
    if getattr(market, "t0_h", None) is not None:
        trip_h = market.t0_h
    else:
        trip_h = nominal_trip_time(tech, market.distance_mi, market.speed_mph)
    diesel_req = table.diesel_energy(market.commodity_group, market.region)
    ton_miles = tons * market.locomotives * market.distance_mi * trips
    gallons = ton_miles * diesel_req / tech.diesel_lhv
    price = tech.diesel_price + tech.diesel_emission * tech.carbon_price / 1000.0
    fuel_cost = gallons * price
    loco_cost = market.locomotives * locomotive_hourly(tech) * trip_h * trips
    return DieselBaseline(
        trips_per_year=trips,
        trip_h=trip_h,
        gallons=gallons,
        fuel_cost=fuel_cost,
        locomotive_cost=loco_cost,
        total_cost=fuel_cost + loco_cost,
    )
