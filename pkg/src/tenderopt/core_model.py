"""Convex dispatch-versus-delay cost model with constant fixed costs.

A train of fixed length trades revenue cars for energy-storage tender cars.
More tenders extend the range between charging stops, shortening the trip
and the time freight sits in transit; but each tender displaces
``weight_ratio`` revenue cars, so more train dispatches are needed to move
the same annual demand. With a constant cost per dispatch the yearly total

    TC(n) = dispatch_cost * Q / (L - w*n)  +  holding_cost * t(n) * Q  +  car_cost * Q

(L = train length, w = weight_ratio, Q = annual demand, t(n) the trip time)
is convex in the tender count n on the feasible interval
[1, (L - 1) / w], so the continuous minimizer has a closed form and the
integer optimum is one of the two integers adjacent to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import DomainError, InfeasibleError

__all__ = [
    "SimpleModelParams",
    "ConfigurationEvaluation",
    "ContinuousOptimum",
    "trip_time",
    "stops_continuous",
    "stops_practical",
    "total_cost_simple",
    "optimal_n_continuous",
    "optimal_range",
    "min_total_cost",
    "optimal_n_integer",
    "derivatives_simple",
]

# Relative slack when comparing a tender count against the payload bound;
# keeps counts produced by the closed form from being rejected for roundoff.
_BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class SimpleModelParams:
    """Inputs for the constant-dispatch-cost model.

    Units: miles, hours, cars, USD, years. ``weight_ratio`` is the number of
    loaded revenue cars one tender car displaces. ``tender_range_mi`` is the
    range one tender adds to the whole train. ``car_cost`` is a per-car
    handling charge that does not depend on the configuration; it defaults
    to zero.
    """

    distance_mi: float
    base_trip_h: float
    train_length: float
    annual_demand: float
    tender_range_mi: float
    weight_ratio: float
    holding_cost: float
    stop_h: float
    dispatch_cost: float
    car_cost: float = 0.0

    def __post_init__(self):
        for name in ("distance_mi", "base_trip_h", "train_length", "annual_demand",
                     "tender_range_mi", "weight_ratio", "holding_cost", "stop_h",
                     "dispatch_cost", "car_cost"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
        for name in ("distance_mi", "train_length", "annual_demand",
                     "tender_range_mi", "weight_ratio"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("base_trip_h", "holding_cost", "stop_h", "dispatch_cost", "car_cost"):
            if getattr(self, name) < 0.0:
                raise DomainError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.train_length < 2.0:
            raise DomainError(
                f"train_length must be at least 2 (one tender + one revenue car), "
                f"got {self.train_length}"
            )
        if self.train_length - self.weight_ratio < 1.0:
            raise InfeasibleError(
                f"train_length {self.train_length} minus weight_ratio "
                f"{self.weight_ratio} leaves no room for one revenue car"
            )

    @property
    def max_tenders(self) -> float:
        """Upper feasibility bound (L - 1) / weight_ratio: payload >= 1 car."""
        return (self.train_length - 1.0) / self.weight_ratio


@dataclass(frozen=True)
class ConfigurationEvaluation:
    """One candidate configuration: geometry, trip time, and cost breakdown.

    ``cost_components`` maps component names to USD/year and sums exactly to
    ``total_cost``. ``stops_practical`` is the operational stop count with
    tenders starting full (fractional stops do not happen), while
    ``stops_continuous`` is the pro-rata count used inside the cost algebra.
    """

    tenders: float
    payload: float
    stops_continuous: float
    stops_practical: int
    range_mi: float
    trip_h: float
    cost_components: Mapping[str, float]
    total_cost: float


@dataclass(frozen=True)
class ContinuousOptimum:
    """Continuous minimizer, with a flag when it sits on a feasibility bound."""

    tenders: float
    boundary: str | None  # None (interior), "lower", or "upper"


def _check_tenders(params: SimpleModelParams, n: float) -> None:
    if not math.isfinite(n) or n < 1.0:
        raise DomainError(f"tender count {n} violates the lower bound n >= 1")
    upper = params.max_tenders
    if n > upper * (1.0 + _BOUND_RTOL) + _BOUND_RTOL:
        raise DomainError(
            f"tender count {n} violates the payload bound n <= (L-1)/weight_ratio "
            f"= {upper}"
        )


def stops_continuous(params: SimpleModelParams, n: float) -> float:
    return params.distance_mi / (params.tender_range_mi * n)


def stops_practical(params: SimpleModelParams, n: float) -> int:
    """ceil(D / range) - 1, floored at zero: stops with tenders starting full."""
    s = stops_continuous(params, n)
    return max(math.ceil(s - 1e-9) - 1, 0)


def trip_time(params: SimpleModelParams, n: float) -> float:
    """Trip duration in hours at tender count ``n`` (pro-rata stop time)."""
    _check_tenders(params, n)
    return params.base_trip_h + stops_continuous(params, n) * params.stop_h


def total_cost_simple(params: SimpleModelParams, n: float) -> ConfigurationEvaluation:
    """Evaluate the yearly cost at tender count ``n``.

    Components: ``order`` (dispatch costs), ``delay`` (in-transit holding),
    ``purchase`` (per-car handling).
    """
    _check_tenders(params, n)
    payload = params.train_length - params.weight_ratio * n
    if payload < 1.0 - _BOUND_RTOL:
        raise InfeasibleError(
            f"payload {payload} at n={n} is below one revenue car"
        )
    t = params.base_trip_h + stops_continuous(params, n) * params.stop_h
    components = {
        "order": params.dispatch_cost * params.annual_demand / payload,
        "delay": params.holding_cost * t * params.annual_demand,
        "purchase": params.car_cost * params.annual_demand,
    }
    return ConfigurationEvaluation(
        tenders=n,
        payload=payload,
        stops_continuous=stops_continuous(params, n),
        stops_practical=stops_practical(params, n),
        range_mi=params.tender_range_mi * n,
        trip_h=t,
        cost_components=components,
        total_cost=sum(components.values()),
    )


def optimal_n_continuous(params: SimpleModelParams) -> ContinuousOptimum:
    """Closed-form continuous minimizer, clamped to the feasible interval.

    Degenerate cases: holding_cost*stop_h*distance = 0 makes the cost
    increasing in n (lower bound); dispatch_cost = 0 makes it decreasing
    (upper bound). Both return the bound with the matching flag, which
    convexity justifies.
    """
    upper = params.max_tenders
    delay_pressure = params.holding_cost * params.stop_h * params.distance_mi
    if delay_pressure == 0.0:
        return ContinuousOptimum(1.0, "lower")
    if params.dispatch_cost == 0.0:
        return ContinuousOptimum(upper, "upper")
    ratio = math.sqrt(
        params.dispatch_cost * params.weight_ratio * params.tender_range_mi
        / delay_pressure
    )
    n = params.train_length / (params.weight_ratio + ratio)
    if n < 1.0:
        return ContinuousOptimum(1.0, "lower")
    if n > upper:
        return ContinuousOptimum(upper, "upper")
    return ContinuousOptimum(n, None)


def optimal_range(params: SimpleModelParams) -> float:
    """Economically optimal train range in miles."""
    return params.tender_range_mi * optimal_n_continuous(params).tenders


def min_total_cost(params: SimpleModelParams) -> float:
    """Yearly cost at the continuous optimum.

    Interior optima use the closed form; boundary optima fall back to
    evaluating the cost at the clamped tender count.
    """
    opt = optimal_n_continuous(params)
    if opt.boundary is not None:
        return total_cost_simple(params, opt.tenders).total_cost
    q, length = params.annual_demand, params.train_length
    stop_load = params.holding_cost * (params.distance_mi / params.tender_range_mi) * params.stop_h
    cross = params.dispatch_cost * params.weight_ratio * stop_load
    order_and_stops = (q / length) * (
        params.dispatch_cost + params.weight_ratio * stop_load + 2.0 * math.sqrt(cross)
    )
    return order_and_stops + params.holding_cost * params.base_trip_h * q + params.car_cost * q


def _adjacent_multiple_argmin(cost_fn, n_continuous: float, multiple: int,
                              m_max: int) -> int:
    """Cheaper of the two feasible multiples adjacent to the continuous optimum.

    Valid for convex costs. Ties resolve to the smaller count.
    """
    target = n_continuous / multiple
    lo = min(max(int(math.floor(target)), 1), m_max)
    hi = min(max(int(math.ceil(target)), 1), m_max)
    if lo == hi:
        return lo * multiple
    n_lo, n_hi = lo * multiple, hi * multiple
    return n_lo if cost_fn(float(n_lo)) <= cost_fn(float(n_hi)) else n_hi


def feasible_multiple_max(params: SimpleModelParams, multiple: int) -> int:
    """Largest feasible m with n = m*multiple, or an InfeasibleError."""
    if multiple < 1 or multiple != int(multiple):
        raise DomainError(f"multiple must be a positive integer, got {multiple}")
    m_max = int(math.floor(params.max_tenders / multiple + 1e-9))
    if m_max < 1:
        raise InfeasibleError(
            f"no feasible configuration: train of {params.train_length} cars cannot "
            f"carry {multiple} tender car(s) (weight_ratio {params.weight_ratio}) "
            f"plus one revenue car"
        )
    return m_max


def optimal_n_integer(params: SimpleModelParams,
                      multiple: int = 1) -> tuple[int, ConfigurationEvaluation]:
    """Integer optimum by the adjacent-integer rule.

    ``multiple`` = 1 optimizes per train; ``multiple`` = locomotives-per-train
    restricts counts to whole tender groups per locomotive. Returns the count
    and its evaluation.
    """
    m_max = feasible_multiple_max(params, multiple)
    cont = optimal_n_continuous(params).tenders
    best = _adjacent_multiple_argmin(
        lambda n: total_cost_simple(params, n).total_cost, cont, multiple, m_max
    )
    return best, total_cost_simple(params, float(best))


def derivatives_simple(params: SimpleModelParams, n: float) -> tuple[float, float]:
    """Analytic first and second derivatives of the yearly cost at ``n``.

    The second derivative is positive everywhere feasible, which is what
    makes the adjacent-integer rule exact.
    """
    _check_tenders(params, n)
    payload = params.train_length - params.weight_ratio * n
    q = params.annual_demand
    stop_load = params.holding_cost * (params.distance_mi / params.tender_range_mi) * params.stop_h
    first = (params.dispatch_cost * q * params.weight_ratio / payload**2
             - stop_load * q / n**2)
    second = (2.0 * params.dispatch_cost * q * params.weight_ratio**2 / payload**3
              + 2.0 * stop_load * q / n**3)
    return first, second
