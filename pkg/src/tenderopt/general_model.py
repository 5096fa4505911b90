"""Cost model with fixed costs that depend on the tender count through time.

Hourly equipment rates turn the per-dispatch cost into

    k(n) = (locomotives * loco_hourly + n * tender_hourly) * t(n)
           + stop_energy_cost * n * s(n)

so longer trips (fewer tenders, more stops) also cost more locomotive and
tender time. Substituting into the dispatch/holding total and regrouping by
powers of n gives five nonnegative coefficients

    TC(n) = A*n/(L - w*n) + B/(L*n - w*n^2) + C/(L - w*n) + E/n + F

which keep the total convex on the feasible interval, so a closed-form
stationary point exists and the adjacent-integer rule still applies. The
closed form can degenerate (zero or negative denominator); a bounded
ternary search over the convex total is the fallback and the authority.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core_model import (
    ConfigurationEvaluation,
    SimpleModelParams,
    _adjacent_multiple_argmin,
    _check_tenders,
    feasible_multiple_max,
    stops_continuous,
    stops_practical,
)
from .errors import ConsistencyError, DomainError

__all__ = [
    "GeneralModelParams",
    "CoefficientSet",
    "GeneralOptimum",
    "MonotonicityReport",
    "CurvatureReport",
    "coefficient_set",
    "fixed_cost",
    "total_cost_general",
    "cost_attribution",
    "derivatives_general",
    "optimal_n_general",
    "monotonicity_certificate",
    "convexity_certificate",
    "ternary_min",
]

# Agreement required between the direct and regrouped forms of the total.
_FORM_RTOL = 1e-10


@dataclass(frozen=True)
class GeneralModelParams:
    """Simple-model geometry plus hourly equipment and per-stop energy rates.

    ``base.dispatch_cost`` is ignored here; dispatch costs are built from
    the rates below. Labor priced by the hour folds into ``loco_hourly`` /
    ``tender_hourly``.
    """

    base: SimpleModelParams
    locomotives: int
    loco_hourly: float
    tender_hourly: float
    stop_energy_cost: float

    def __post_init__(self):
        if self.locomotives < 1 or self.locomotives != int(self.locomotives):
            raise DomainError(f"locomotives must be a positive integer, got {self.locomotives}")
        for name in ("loco_hourly", "tender_hourly", "stop_energy_cost"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise DomainError(f"{name} must be finite and nonnegative, got {value}")


@dataclass(frozen=True)
class CoefficientSet:
    """Nonnegative coefficients of the regrouped total (USD/year scale).

    A: tender time cost over the nominal trip; B: locomotive time cost spent
    stopped; C: per-dispatch costs independent of n (locomotive nominal time,
    tender stop time, stop energy); E: holding cost of stop time; F: holding
    cost of the nominal trip.
    """

    A: float
    B: float
    C: float
    E: float
    F: float


def coefficient_set(params: GeneralModelParams) -> CoefficientSet:
    b = params.base
    q = b.annual_demand
    stops_per_trip = b.distance_mi / b.tender_range_mi  # at one mile of range per tender
    return CoefficientSet(
        A=params.tender_hourly * b.base_trip_h * q,
        B=params.locomotives * params.loco_hourly * stops_per_trip * b.stop_h * q,
        C=(params.locomotives * params.loco_hourly * b.base_trip_h
           + params.tender_hourly * stops_per_trip * b.stop_h
           + params.stop_energy_cost * stops_per_trip) * q,
        E=b.holding_cost * stops_per_trip * b.stop_h * q,
        F=b.holding_cost * b.base_trip_h * q,
    )


def fixed_cost(params: GeneralModelParams, n: float) -> float:
    """Per-train dispatch cost at tender count ``n`` (USD/train)."""
    b = params.base
    _check_tenders(b, n)
    s = stops_continuous(b, n)
    t = b.base_trip_h + s * b.stop_h
    return (params.locomotives * params.loco_hourly + n * params.tender_hourly) * t \
        + params.stop_energy_cost * n * s


def total_cost_general(params: GeneralModelParams, n: float) -> ConfigurationEvaluation:
    """Evaluate the yearly cost at ``n`` with a five-way component breakdown.

    Components: ``locomotive`` and ``tender`` equipment time over the nominal
    trip, ``charging`` energy, ``delay`` (all stop-time costs plus holding per
    stop), and ``constant`` (holding over the nominal trip). The direct and
    regrouped forms of the total are both computed and must agree to
    1e-10 relative; disagreement raises ConsistencyError.
    """
    b = params.base
    _check_tenders(b, n)
    payload = b.train_length - b.weight_ratio * n
    q = b.annual_demand
    s = stops_continuous(b, n)
    t = b.base_trip_h + s * b.stop_h

    direct = fixed_cost(params, n) * q / payload + b.holding_cost * t * q

    co = coefficient_set(params)
    length = b.train_length
    regrouped = (co.A * n / payload
                 + co.B / (length * n - b.weight_ratio * n**2)
                 + co.C / payload
                 + co.E / n
                 + co.F)
    scale = max(abs(direct), abs(regrouped), 1e-30)
    if abs(direct - regrouped) > _FORM_RTOL * scale:
        raise ConsistencyError(
            f"direct ({direct}) and regrouped ({regrouped}) totals disagree at n={n}"
        )

    stop_load = (b.distance_mi / b.tender_range_mi) * b.stop_h * q
    components = {
        "locomotive": params.locomotives * params.loco_hourly * b.base_trip_h * q / payload,
        "tender": params.tender_hourly * b.base_trip_h * q * n / payload,
        "charging": params.stop_energy_cost * (b.distance_mi / b.tender_range_mi) * q / payload,
        "delay": (params.locomotives * params.loco_hourly / (length * n - b.weight_ratio * n**2)
                  + params.tender_hourly / payload
                  + b.holding_cost / n) * stop_load,
        "constant": b.holding_cost * b.base_trip_h * q,
    }
    return ConfigurationEvaluation(
        tenders=n,
        payload=payload,
        stops_continuous=s,
        stops_practical=stops_practical(b, n),
        range_mi=b.tender_range_mi * n,
        trip_h=t,
        cost_components=components,
        total_cost=sum(components.values()),
    )


def cost_attribution(params: GeneralModelParams, n: float) -> dict[str, float]:
    """Regroup the same total by who is paid: locomotive and battery
    equipment over the whole trip, charging energy, and freight holding.

    Sums to the same total as :func:`total_cost_general`.
    """
    b = params.base
    _check_tenders(b, n)
    payload = b.train_length - b.weight_ratio * n
    q = b.annual_demand
    s = stops_continuous(b, n)
    t = b.base_trip_h + s * b.stop_h
    return {
        "locomotive": params.locomotives * params.loco_hourly * t * q / payload,
        "battery": params.tender_hourly * n * t * q / payload,
        "charging": params.stop_energy_cost * n * s * q / payload,
        "delay": b.holding_cost * t * q,
    }


def derivatives_general(params: GeneralModelParams, n: float) -> tuple[float, float]:
    """Analytic first and second derivatives of the regrouped total at ``n``."""
    b = params.base
    _check_tenders(b, n)
    co = coefficient_set(params)
    w, length = b.weight_ratio, b.train_length
    payload = length - w * n
    hyperbola = length * n - w * n**2  # = n * payload
    first = (co.A * length / payload**2
             + co.B * (2.0 * w * n - length) / hyperbola**2
             + co.C * w / payload**2
             - co.E / n**2)
    second = (co.A * 2.0 * w * length / payload**3
              + co.B * 2.0 * (3.0 * (w * n - length / 2.0)**2 + length**2 / 4.0)
              / (n**3 * payload**3)
              + co.C * 2.0 * w**2 / payload**3
              + co.E * 2.0 / n**3)
    return first, second


def ternary_min(fn: Callable[[float], float], lower: float, upper: float,
                rtol: float = 1e-12) -> float:
    """Minimizer of a convex function on [lower, upper] by ternary search.

    On flat stretches the search drifts toward the lower end, matching the
    smallest-count tie-break used everywhere else.
    """
    lo, hi = lower, upper
    while hi - lo > rtol * max(1.0, hi):
        third = (hi - lo) / 3.0
        m1, m2 = lo + third, hi - third
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class GeneralOptimum:
    """Continuous and integer optima of the general model."""

    continuous: float
    boundary: str | None
    tenders: int                       # integer optimum (multiple of the granularity)
    per_group: int                     # tenders / granularity
    evaluation: ConfigurationEvaluation
    used_fallback: bool                # ternary search instead of the closed form


def _continuous_optimum(params: GeneralModelParams) -> tuple[float, str | None, bool]:
    b = params.base
    upper = b.max_tenders
    co = coefficient_set(params)
    w, length = b.weight_ratio, b.train_length

    denominator = co.A * length + co.C * w - co.E * w**2
    shift = co.B + co.E * length
    radicand = shift * (co.A * length**2 + co.B * w**2 + co.C * length * w)
    scale = max(co.A * length, co.C * w, co.E * w**2, 1.0)

    candidate = None
    if abs(denominator) >= 1e-12 * scale and radicand >= 0.0:
        root = (-w * shift + math.sqrt(radicand)) / denominator
        if math.isfinite(root) and root > 0.0:
            candidate = root
    if candidate is None:
        fallback = ternary_min(lambda x: total_cost_general(params, x).total_cost, 1.0, upper)
        boundary = None
        if fallback - 1.0 <= 1e-6:
            fallback, boundary = 1.0, "lower"
        elif upper - fallback <= 1e-6 * max(1.0, upper):
            fallback, boundary = upper, "upper"
        return fallback, boundary, True
    if candidate < 1.0:
        return 1.0, "lower", False
    if candidate > upper:
        return upper, "upper", False
    return candidate, None, False


def optimal_n_general(params: GeneralModelParams, multiple: int = 1,
                      cross_check: bool = False) -> GeneralOptimum:
    """Continuous plus integer optimum under the adjacent-integer rule.

    ``multiple`` = 1 optimizes whole-train counts; ``multiple`` = locomotives
    per train restricts counts to whole tender groups per locomotive. With
    ``cross_check`` the closed-form stationary point is verified against
    ternary search on every call.
    """
    m_max = feasible_multiple_max(params.base, multiple)
    cont, boundary, used_fallback = _continuous_optimum(params)
    if cross_check and not used_fallback:
        verified = ternary_min(
            lambda x: total_cost_general(params, x).total_cost, 1.0, params.base.max_tenders
        )
        if abs(cont - verified) > 1e-6 * max(1.0, verified):
            raise ConsistencyError(
                f"closed-form optimum {cont} disagrees with ternary search {verified}"
            )
    best = _adjacent_multiple_argmin(
        lambda x: total_cost_general(params, x).total_cost, cont, multiple, m_max
    )
    return GeneralOptimum(
        continuous=cont,
        boundary=boundary,
        tenders=best,
        per_group=best // multiple,
        evaluation=total_cost_general(params, float(best)),
        used_fallback=used_fallback,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    """Signs of the component cost slopes at one tender count.

    The equipment and charging components increase in n whenever their rates
    are positive. For the delay component the report carries the exact
    tender-rate threshold below which it decreases, next to a coarser
    published-style condition (``coarse_condition_holds``) that is only
    conservative when weight_ratio * n^2 <= 1.
    """

    tenders: float
    locomotive_slope: float
    tender_slope: float
    charging_slope: float
    delay_slope: float
    delay_decreasing: bool
    tender_rate_threshold: float       # exact: delay decreasing iff tender_hourly <= this
    coarse_condition_holds: bool


def monotonicity_certificate(params: GeneralModelParams, n: float) -> MonotonicityReport:
    """Analytic slopes of the five cost components at ``n``."""
    b = params.base
    _check_tenders(b, n)
    w, length, q = b.weight_ratio, b.train_length, b.annual_demand
    payload = length - w * n
    stop_load = (b.distance_mi / b.tender_range_mi) * b.stop_h * q
    loco_rate = params.locomotives * params.loco_hourly

    delay_slope = (loco_rate * (2.0 * w * n - length) / (length * n - w * n**2)**2
                   + params.tender_hourly * w / payload**2
                   - b.holding_cost / n**2) * stop_load
    # Exact rearrangement of delay_slope <= 0 as a bound on the tender rate.
    threshold = (loco_rate * (length - 2.0 * w * n) + b.holding_cost * payload**2) / (w * n**2)
    coarse = (params.tender_hourly
              <= loco_rate * (length - 2.0 * w * n) / (w * n**2)
              + b.holding_cost * payload**2) and (length - 2.0 * w * n) <= 0.0
    return MonotonicityReport(
        tenders=n,
        locomotive_slope=loco_rate * b.base_trip_h * q * w / payload**2,
        tender_slope=params.tender_hourly * b.base_trip_h * q * length / payload**2,
        charging_slope=params.stop_energy_cost * (b.distance_mi / b.tender_range_mi)
        * q * w / payload**2,
        delay_slope=delay_slope,
        delay_decreasing=delay_slope <= 0.0,
        tender_rate_threshold=threshold,
        coarse_condition_holds=coarse,
    )


@dataclass(frozen=True)
class CurvatureReport:
    """Second derivatives of the total and each component at the samples."""

    samples: tuple[float, ...]
    total: tuple[float, ...]
    locomotive: tuple[float, ...]
    tender: tuple[float, ...]
    charging: tuple[float, ...]
    delay: tuple[float, ...]
    fd_max_rel_err: float              # worst central-difference mismatch (nan if none fit)


def convexity_certificate(params: GeneralModelParams, samples) -> CurvatureReport:
    """Analytic curvature of the total and components at each sample.

    Every value must be nonnegative on the feasible domain; a negative one
    indicates an implementation bug and raises ConsistencyError. Samples far
    enough from the bounds are also cross-checked against second-order
    central differences.
    """
    b = params.base
    w, length, q = b.weight_ratio, b.train_length, b.annual_demand
    stop_load = (b.distance_mi / b.tender_range_mi) * b.stop_h * q
    loco_rate = params.locomotives * params.loco_hourly
    upper = b.max_tenders

    pts, total, loco, tender, charging, delay = [], [], [], [], [], []
    worst_fd = math.nan
    for n in samples:
        _check_tenders(b, n)
        payload = length - w * n
        cube = payload**3
        loco_curv = loco_rate * b.base_trip_h * q * 2.0 * w**2 / cube
        tender_curv = params.tender_hourly * b.base_trip_h * q * 2.0 * w * length / cube
        charging_curv = (params.stop_energy_cost * (b.distance_mi / b.tender_range_mi)
                         * q * 2.0 * w**2 / cube)
        delay_curv = 2.0 * (loco_rate * (3.0 * w**2 * n**2 - 3.0 * length * w * n + length**2)
                            / (length * n - w * n**2)**3
                            + params.tender_hourly * w**2 / cube
                            + b.holding_cost / n**3) * stop_load
        _, total_curv = derivatives_general(params, n)
        for label, value in (("total", total_curv), ("locomotive", loco_curv),
                             ("tender", tender_curv), ("charging", charging_curv),
                             ("delay", delay_curv)):
            if value < 0.0:
                raise ConsistencyError(
                    f"{label} curvature {value} is negative at n={n}: model violation"
                )
        step = 1e-4 * max(1.0, n)
        if n - 2.0 * step >= 1.0 and n + 2.0 * step <= upper and total_curv > 0.0:
            fd = (total_cost_general(params, n + step).total_cost
                  - 2.0 * total_cost_general(params, n).total_cost
                  + total_cost_general(params, n - step).total_cost) / step**2
            err = abs(fd - total_curv) / total_curv
            worst_fd = err if math.isnan(worst_fd) else max(worst_fd, err)
        pts.append(n)
        total.append(total_curv)
        loco.append(loco_curv)
        tender.append(tender_curv)
        charging.append(charging_curv)
        delay.append(delay_curv)
    return CurvatureReport(
        samples=tuple(pts),
        total=tuple(total),
        locomotive=tuple(loco),
        tender=tuple(tender),
        charging=tuple(charging),
        delay=tuple(delay),
        fd_max_rel_err=worst_fd,
    )
