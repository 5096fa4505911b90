"""Brute-force and numeric cross-checks used by the test suite.

Everything here is deliberately dumb: dense grids, exhaustive scans,
central differences, and a stop-by-stop trip simulation. These functions
never import the closed-form model modules; independence is the point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = ["GridSpec", "grid_min", "integer_scan", "finite_diff", "trip_accumulate"]


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid over tender counts: lower/upper bounds and step."""

    lower: float
    upper: float
    step: float

    def __post_init__(self):
        if self.lower < 1.0:
            raise DomainError(f"grid lower bound {self.lower} is below 1")
        if self.step <= 0.0:
            raise DomainError(f"grid step {self.step} must be positive")
        if self.upper < self.lower:
            raise DomainError(f"empty grid: upper {self.upper} < lower {self.lower}")


def grid_min(cost_fn: Callable, grid: GridSpec) -> tuple[float, float]:
    """Exhaustively evaluate ``cost_fn`` on the grid; ties go to the smallest n.

    ``cost_fn`` must accept a numpy array (plain arithmetic expressions do).
    Returns ``(n_at_min, cost)``.
    """
    count = int(math.floor((grid.upper - grid.lower) / grid.step + 1e-9)) + 1
    points = grid.lower + grid.step * np.arange(count)
    if points[-1] < grid.upper - 1e-12 * max(1.0, grid.upper):
        points = np.append(points, grid.upper)
    costs = np.asarray(cost_fn(points), dtype=float)
    idx = int(np.argmin(costs))  # argmin returns the first minimum: smallest n wins
    return float(points[idx]), float(costs[idx])


def integer_scan(cost_fn: Callable[[float], float], train_length: float,
                 weight_ratio: float, multiple: int = 1) -> int:
    """Cheapest feasible tender count among multiples of ``multiple``.

    Feasible counts are m*multiple for integer m >= 1 with payload
    train_length - weight_ratio*n >= 1. Ties resolve to the smallest count.
    """
    m_max = int(math.floor((train_length - 1.0) / (weight_ratio * multiple) + 1e-9))
    if m_max < 1:
        raise DomainError(
            f"no feasible tender count: train length {train_length} cannot carry "
            f"{multiple} tender car(s) plus one revenue car"
        )
    best_n, best_cost = None, math.inf
    for m in range(1, m_max + 1):
        n = m * multiple
        cost = cost_fn(float(n))
        if cost < best_cost:
            best_n, best_cost = n, cost
    return best_n


def finite_diff(cost_fn: Callable[[float], float], n: float, order: int = 1,
                lower: float = -math.inf, upper: float = math.inf) -> float:
    """Central finite difference of ``cost_fn`` at ``n``.

    Step sizes: 1e-6*max(1, n) for first derivatives, 1e-4*max(1, n) for
    second. The stencil must fit inside (lower, upper) with a margin of two
    steps, otherwise a DomainError is raised.
    """
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    step = (1e-6 if order == 1 else 1e-4) * max(1.0, abs(n))
    if n - 2 * step < lower or n + 2 * step > upper:
        raise DomainError(
            f"insufficient margin for central differences at n={n} "
            f"(need {2 * step} inside [{lower}, {upper}])"
        )
    if order == 1:
        return (cost_fn(n + step) - cost_fn(n - step)) / (2.0 * step)
    return (cost_fn(n + step) - 2.0 * cost_fn(n) + cost_fn(n - step)) / step**2


def trip_accumulate(distance_mi: float, range_per_tender_mi: float, n: float,
                    base_trip_h: float, stop_h: float,
                    mode: str = "continuous") -> tuple[float, float]:
    """Trip duration from first principles; returns ``(hours, stops)``.

    ``continuous`` charges fractional stop time pro rata. ``ceiling``
    simulates the run segment by segment: tenders start full, and the train
    halts for a full stop each time the remaining range runs out before the
    destination.
    """
    total_range = range_per_tender_mi * n
    if mode == "continuous":
        stops = distance_mi / total_range
        return base_trip_h + stops * stop_h, stops
    if mode != "ceiling":
        raise DomainError(f"unknown trip mode {mode!r}")
    remaining = distance_mi
    stops = 0
    while remaining > total_range * (1.0 + 1e-12):
        remaining -= total_range
        stops += 1
    return base_trip_h + stops * stop_h, float(stops)
