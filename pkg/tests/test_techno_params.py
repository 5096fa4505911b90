import dataclasses
import math
from pathlib import Path

import pytest

from tenderopt.errors import DomainError, TableLookupError
from tenderopt.market_pipeline import MarketRecord
from tenderopt.techno_params import (
    TechInputs,
    battery_hourly,
    charge_cost_per_stop,
    default_delay_bands,
    default_energy_table,
    delay_cost_lookup,
    diesel_baseline,
    effective_capacity,
    hourly_cost_from_annual,
    hourly_equipment_cost,
    load_tech_params,
    locomotive_hourly,
    nominal_trip_time,
    range_per_tender,
    stop_time,
)

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "tenderopt" / "data"


class TestEffectiveCapacity:
    def test_default_technology(self, tech):
        assert effective_capacity(tech) == pytest.approx(10.64, rel=1e-12)

    def test_identity_when_no_derating(self):
        t = dataclasses.replace(TechInputs(), charging_depth=1.0, battery_efficiency=1.0)
        assert effective_capacity(t) == t.battery_capacity

    def test_hand_case(self):
        t = dataclasses.replace(TechInputs(), battery_capacity=10.0,
                                charging_depth=0.5, battery_efficiency=0.9)
        assert effective_capacity(t) == pytest.approx(4.5)


class TestStopTime:
    def test_default_charger(self, tech):
        assert stop_time(tech) == pytest.approx(14.0 * 0.8 / 3.0)
        assert abs(stop_time(tech) - 3.73) / 3.73 < 0.005

    def test_slow_charger(self, tech):
        slow = dataclasses.replace(tech, charger_power=0.4)
        assert stop_time(slow) == pytest.approx(28.0)

    def test_swap_mode(self, tech):
        assert stop_time(tech, swap_h=0.5) == 0.5

    def test_times_power_recovers_energy(self, tech):
        assert stop_time(tech) * tech.charger_power == pytest.approx(
            tech.battery_capacity * tech.charging_depth, rel=0)

    def test_zero_power_rejected(self, tech):
        with pytest.raises(DomainError, match="positive"):
            dataclasses.replace(tech, charger_power=0.0)


class TestChargeCost:
    def test_default_energy_and_carbon(self, tech):
        cost = charge_cost_per_stop(tech)
        assert cost == pytest.approx(11200.0 * 0.15 + 11200.0 * 0.387 * 0.125)
        assert abs(cost - 2240.0) / 2240.0 < 0.01

    def test_zero_carbon_price(self, tech):
        assert charge_cost_per_stop(dataclasses.replace(tech, carbon_price=0.0)) \
            == pytest.approx(1680.0)

    def test_zero_grid_intensity_equivalent(self, tech):
        a = charge_cost_per_stop(dataclasses.replace(tech, carbon_price=0.0))
        b = charge_cost_per_stop(dataclasses.replace(tech, grid_intensity=1e-300))
        assert a == pytest.approx(b)

    def test_grid_side_billing_overshoots(self, tech):
        grid_side = charge_cost_per_stop(tech, at_battery=False)
        assert grid_side == pytest.approx(charge_cost_per_stop(tech) / 0.95)
        assert grid_side > 2240.0


class TestRangePerTender:
    def test_coal_western(self, tech):
        r = range_per_tender(tech, default_energy_table(), "Coal", "Western", 2540.0)
        assert abs(r - 320.0) / 320.0 < 0.01

    def test_intermodal_western(self, tech):
        r = range_per_tender(tech, default_energy_table(), "Intermodal", "Western", 1600.0)
        assert abs(r - 62.0) / 62.0 < 0.02

    def test_unit_cancellation(self, tech):
        # relative efficiency 1, diesel intensity exactly one kWh/ton-mile,
        # tonnage equal to the effective capacity in kWh -> one mile of range
        t = dataclasses.replace(tech, relative_efficiency=1.0)
        table = default_energy_table()
        table = dataclasses.replace(
            table, energy_btu_per_ton_mile={("coal", "western"): 3412.14})
        tons = effective_capacity(t) * 1000.0
        assert range_per_tender(t, table, "Coal", "Western", tons) == pytest.approx(1.0)

    def test_homogeneous_in_tonnage(self, tech):
        table = default_energy_table()
        one = range_per_tender(tech, table, "Coal", "Western", 2000.0)
        two = range_per_tender(tech, table, "Coal", "Western", 4000.0)
        assert two == pytest.approx(one / 2.0, rel=0)

    def test_unknown_commodity_lists_valid_keys(self, tech):
        with pytest.raises(TableLookupError, match="valid keys.*coal"):
            range_per_tender(tech, default_energy_table(), "Gravel", "Western", 1000.0)

    def test_nonpositive_tonnage_rejected(self, tech):
        with pytest.raises(DomainError):
            range_per_tender(tech, default_energy_table(), "Coal", "Western", 0.0)


class TestHourlyEquipmentCost:
    def test_battery_against_independent_discounting(self, tech):
        # Oracle: continuous discounting written out from scratch.
        rate, horizon, lifetime = 0.03, 26.0, 13.0
        npv = 1_271_816.0 + 452_908.0 * math.exp(-rate * lifetime)
        npv += 36_500.0 * (1.0 - math.exp(-rate * horizon)) / rate
        annual = npv * rate / (1.0 - math.exp(-rate * horizon))
        expected = annual / (0.25 * 8760.0)
        assert battery_hourly(tech) == pytest.approx(expected, rel=1e-12)
        assert abs(battery_hourly(tech) - 58.0) / 58.0 < 0.05

    def test_locomotive_shortcut(self, tech):
        assert locomotive_hourly(tech) == pytest.approx(516_000.0 / (0.25 * 8760.0), rel=0)
        assert abs(locomotive_hourly(tech) - 236.0) / 236.0 < 0.01

    def test_zero_rate_limit(self):
        # single asset, no replacement, no discounting
        value = hourly_equipment_cost(capital=100_000.0, future_capital=0.0,
                                      maintenance=5_000.0, lifetime=10.0, horizon=10.0,
                                      rate=0.0, utilization=0.5)
        assert value == pytest.approx((100_000.0 / 10.0 + 5_000.0) / (0.5 * 8760.0))

    def test_continuous_at_zero_rate(self):
        kwargs = dict(capital=500_000.0, future_capital=200_000.0, maintenance=10_000.0,
                      lifetime=5.0, horizon=15.0, utilization=0.25)
        near_zero = hourly_equipment_cost(rate=1e-9, **kwargs)
        at_zero = hourly_equipment_cost(rate=0.0, **kwargs)
        assert near_zero == pytest.approx(at_zero, rel=1e-6)

    def test_non_multiple_horizon_rejected(self):
        with pytest.raises(DomainError, match="replacement"):
            hourly_equipment_cost(1.0, 1.0, 1.0, lifetime=7.0, horizon=20.0,
                                  rate=0.03, utilization=0.5)

    def test_bad_utilization(self):
        with pytest.raises(DomainError):
            hourly_cost_from_annual(1000.0, 0.0)


class TestDelayCost:
    def test_long_intermodal(self):
        assert delay_cost_lookup("intermodal", 2300.0) == 28.36

    def test_unit_train(self):
        assert delay_cost_lookup("unit", 700.0) == 8.42

    def test_manifest_band_boundary_upper_inclusive(self):
        assert delay_cost_lookup("manifest", 1000.0) == 17.57

    def test_intermodal_band_edges(self):
        assert delay_cost_lookup("intermodal", 1000.0) == 26.06
        assert delay_cost_lookup("intermodal", 1000.0001) == 26.95
        assert delay_cost_lookup("intermodal", 1500.0) == 26.95
        assert delay_cost_lookup("intermodal", 1500.0001) == 28.36

    def test_unknown_type(self):
        with pytest.raises(TableLookupError):
            delay_cost_lookup("bullet", 100.0)

    def test_nonpositive_distance(self):
        with pytest.raises(DomainError):
            delay_cost_lookup("unit", 0.0)


class TestNominalTripTime:
    def test_speed_plus_initial_stop(self, tech):
        assert nominal_trip_time(tech, 1400.0, 21.0) == pytest.approx(1400.0 / 21.0 + 4.0)

    def test_bad_speed(self, tech):
        with pytest.raises(DomainError):
            nominal_trip_time(tech, 100.0, 0.0)


COAL_MARKET = MarketRecord(
    market_id="coal-prb", railroad="BNSF", region="Western", commodity_group="Coal",
    distance_mi=1400.0, annual_demand_cars=1000.0, train_length_cars=73.0,
    locomotives=5, alpha=1.3, t0_h=70.7, gross_tons=2540.0,
)


class TestDieselBaseline:
    def test_fuel_price_includes_carbon(self, tech):
        baseline = diesel_baseline(COAL_MARKET, default_energy_table(), tech)
        price = 2.47 + 12.36 * 125.0 / 1000.0
        assert price == pytest.approx(4.015)
        assert baseline.fuel_cost == pytest.approx(baseline.gallons * price, rel=1e-12)

    def test_zero_carbon_price(self, tech):
        clean = dataclasses.replace(tech, carbon_price=0.0)
        baseline = diesel_baseline(COAL_MARKET, default_energy_table(), clean)
        assert baseline.fuel_cost == pytest.approx(baseline.gallons * 2.47, rel=1e-12)

    def test_coal_corridor_in_published_band(self, tech):
        # Reference total for this corridor is 2,111,418 USD/yr; the gross
        # tonnage basis is ambiguous, so the check is deliberately loose.
        baseline = diesel_baseline(COAL_MARKET, default_energy_table(), tech)
        assert abs(baseline.total_cost - 2_111_418.0) / 2_111_418.0 < 0.20

    def test_missing_tonnage_rejected(self, tech):
        record = dataclasses.replace(COAL_MARKET, gross_tons=None)
        with pytest.raises(DomainError, match="gross_tons"):
            diesel_baseline(record, default_energy_table(), tech)

    def test_carbon_price_monotone(self, tech):
        totals = [
            diesel_baseline(COAL_MARKET, default_energy_table(),
                            dataclasses.replace(tech, carbon_price=p)).total_cost
            for p in (0.0, 25.0, 60.0, 125.0)
        ]
        assert all(a < b for a, b in zip(totals, totals[1:]))


class TestLoaders:
    def test_defaults_match_bundled_file(self):
        assert load_tech_params() == TechInputs()

    def test_params_file_roundtrip_bit_exact(self):
        text = (DATA_DIR / "default_params.txt").read_text()
        loaded = load_tech_params()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            assert getattr(loaded, key.strip()) == float(value.strip())

    def test_energy_table_roundtrip_bit_exact(self):
        table = default_energy_table()
        for line in (DATA_DIR / "energy_requirements.csv").read_text().splitlines():
            if not line.strip() or line.startswith("#") or line.startswith("commodity"):
                continue
            commodity, region, value = [c.strip() for c in line.split(",")]
            assert table.diesel_energy(commodity, region) == float(value)

    def test_speed_table_roundtrip_bit_exact(self):
        table = default_energy_table()
        for line in (DATA_DIR / "train_speeds.csv").read_text().splitlines():
            if not line.strip() or line.startswith("#") or line.startswith("railroad"):
                continue
            railroad, train_type, value = [c.strip() for c in line.split(",")]
            assert table.speed(railroad, train_type) == float(value)

    def test_delay_table_roundtrip_bit_exact(self):
        bands = default_delay_bands()
        for line in (DATA_DIR / "delay_costs.csv").read_text().splitlines():
            if not line.strip() or line.startswith("#") or line.startswith("train_type"):
                continue
            train_type, lo, hi, usd = [c.strip() for c in line.split(",")]
            probe = float(lo) + 1.0
            assert bands.lookup(train_type, probe) == float(usd)

    def test_unknown_key_rejected(self, tmp_path):
        bad = tmp_path / "params.txt"
        bad.write_text("battery_capacity = 14\nwarp_drive = 9\n")
        with pytest.raises(DomainError, match="warp_drive"):
            load_tech_params(bad)

    def test_custom_file_overrides(self, tmp_path):
        custom = tmp_path / "params.txt"
        custom.write_text("charger_power = 0.4  # MW\n")
        assert load_tech_params(custom).charger_power == 0.4
