"""Shared fixtures and random-instance generators."""
from pathlib import Path

import numpy as np
import pytest

from tenderopt.core_model import SimpleModelParams
from tenderopt.general_model import GeneralModelParams
from tenderopt.techno_params import TechInputs

REPO_ROOT = Path(__file__).resolve().parent.parent
SYNTHETIC_CSV = REPO_ROOT / "data" / "synthetic_markets.csv"


@pytest.fixture(scope="session")
def tech() -> TechInputs:
    return TechInputs()


@pytest.fixture(scope="session")
def synthetic_path() -> Path:
    assert SYNTHETIC_CSV.exists(), "bundled synthetic market file is missing"
    return SYNTHETIC_CSV


def random_simple_params(rng: np.random.RandomState, max_span: float = 25.0,
                         with_dispatch: bool = True) -> SimpleModelParams:
    """One random feasible parameter set.

    The feasible tender interval [1, (L-1)/w] spans between 2.5 and
    ``max_span`` units so grid oracles stay cheap.
    """
    alpha = 10.0 ** rng.uniform(np.log10(0.3), np.log10(8.0))
    span = rng.uniform(max(2.5, 1.0 / alpha), max_span)  # keeps train_length >= 2
    return SimpleModelParams(
        distance_mi=10.0 ** rng.uniform(2.0, 3.5),
        base_trip_h=rng.uniform(10.0, 120.0),
        train_length=alpha * span + 1.0,
        annual_demand=rng.uniform(100.0, 5000.0),
        tender_range_mi=rng.uniform(5.0, 400.0),
        weight_ratio=alpha,
        holding_cost=rng.uniform(0.5, 50.0),
        stop_h=rng.uniform(0.2, 20.0),
        dispatch_cost=10.0 ** rng.uniform(3.0, 6.0) if with_dispatch else 0.0,
    )


def random_general_params(rng: np.random.RandomState, max_span: float = 25.0,
                          allow_zero_rates: bool = True) -> GeneralModelParams:
    base = random_simple_params(rng, max_span=max_span, with_dispatch=False)
    def rate(hi):
        if allow_zero_rates and rng.random_sample() < 0.1:
            return 0.0
        return rng.uniform(1.0, hi)
    return GeneralModelParams(
        base=base,
        locomotives=int(rng.randint(1, 7)),
        loco_hourly=rate(500.0),
        tender_hourly=rate(200.0),
        stop_energy_cost=rate(5000.0),
    )


def simple_cost_closure(p: SimpleModelParams):
    """Independent re-expression of the yearly cost, numpy-vectorizable."""
    def cost(n):
        payload = p.train_length - p.weight_ratio * n
        trip = p.base_trip_h + p.distance_mi / (p.tender_range_mi * n) * p.stop_h
        return (p.dispatch_cost * p.annual_demand / payload
                + p.holding_cost * trip * p.annual_demand
                + p.car_cost * p.annual_demand)
    return cost


def general_cost_closure(g: GeneralModelParams):
    """Independent re-expression of the general yearly cost."""
    p = g.base
    def cost(n):
        payload = p.train_length - p.weight_ratio * n
        stops = p.distance_mi / (p.tender_range_mi * n)
        trip = p.base_trip_h + stops * p.stop_h
        dispatch = ((g.locomotives * g.loco_hourly + n * g.tender_hourly) * trip
                    + g.stop_energy_cost * n * stops)
        return dispatch * p.annual_demand / payload + p.holding_cost * trip * p.annual_demand
    return cost
