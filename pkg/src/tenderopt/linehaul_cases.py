"""Three reference linehaul markets used in tests, demos, and docs.

Two LA-Chicago movements (intermodal and automotive, light cars, big
weight ratio) and a Powder River Basin-Chicago coal movement (heavy cars,
small weight ratio, slow and time-insensitive). Each case states its
tender range on the per-locomotive basis: one tender adds ``tender_range``
miles for each locomotive it serves, so a train with ``locomotives``
engines needs that many tenders per range increment.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core_model import SimpleModelParams
from .general_model import GeneralModelParams
from .techno_params import TechInputs, battery_hourly, locomotive_hourly

__all__ = ["LinehaulCase", "INTERMODAL_LA_CHICAGO", "AUTOMOTIVE_LA_CHICAGO",
           "COAL_PRB_CHICAGO", "ALL_CASES"]


@dataclass(frozen=True)
class LinehaulCase:
    """Market inputs for one corridor, per-locomotive range basis."""

    name: str
    distance_mi: float
    base_trip_h: float
    train_length: float
    annual_demand: float
    tender_range_mi: float          # per locomotive served
    weight_ratio: float
    holding_cost: float
    stop_h: float
    stop_energy_cost: float
    locomotives: int

    def model(self, tech: TechInputs | None = None) -> GeneralModelParams:
        """Build the cost model; hourly rates default to the bundled
        technology file."""
        tech = tech or TechInputs()
        base = SimpleModelParams(
            distance_mi=self.distance_mi,
            base_trip_h=self.base_trip_h,
            train_length=self.train_length,
            annual_demand=self.annual_demand,
            tender_range_mi=self.tender_range_mi / self.locomotives,
            weight_ratio=self.weight_ratio,
            holding_cost=self.holding_cost,
            stop_h=self.stop_h,
            dispatch_cost=0.0,
        )
        return GeneralModelParams(
            base=base,
            locomotives=self.locomotives,
            loco_hourly=locomotive_hourly(tech),
            tender_hourly=battery_hourly(tech),
            stop_energy_cost=self.stop_energy_cost,
        )


INTERMODAL_LA_CHICAGO = LinehaulCase(
    name="intermodal-la-chicago",
    distance_mi=2300.0,
    base_trip_h=75.7,
    train_length=118.0,
    annual_demand=1500.0,
    tender_range_mi=62.0,
    weight_ratio=10.4,
    holding_cost=32.0,
    stop_h=3.73,
    stop_energy_cost=2240.0,
    locomotives=1,
)

AUTOMOTIVE_LA_CHICAGO = LinehaulCase(
    name="automotive-la-chicago",
    distance_mi=2300.0,
    base_trip_h=109.0,
    train_length=118.0,
    annual_demand=3000.0,
    tender_range_mi=76.0,
    weight_ratio=10.4,
    holding_cost=9.5,
    stop_h=3.73,
    stop_energy_cost=2240.0,
    locomotives=1,
)

# Five road units per coal train: at the single-tender-group configuration
# this matches the ~5.2 locomotives per dispatched train implied by the
# corridor's fleet counts, and it keeps ten tender groups feasible on a
# 73-car train.
COAL_PRB_CHICAGO = LinehaulCase(
    name="coal-prb-chicago",
    distance_mi=1400.0,
    base_trip_h=70.7,
    train_length=73.0,
    annual_demand=1000.0,
    tender_range_mi=320.0,
    weight_ratio=1.3,
    holding_cost=9.5,
    stop_h=3.73,
    stop_energy_cost=2240.0,
    locomotives=5,
)

ALL_CASES = (INTERMODAL_LA_CHICAGO, AUTOMOTIVE_LA_CHICAGO, COAL_PRB_CHICAGO)
