"""Synthetic freight-market population for batch studies.

Real carload waybill flows are confidential, so network-wide runs here use
a generated population of origin-destination / railroad / commodity
markets. Distributions are chosen per commodity group (heavier bulk
commodities: long trains sliced across several locomotives, small weight
ratios, low delay cost bands; intermodal: long fast trains, light cars,
high delay costs) and calibrated so the OPTIMIZED medians under the default
scenario land near published network statistics: one tender group per
locomotive for coal and other bulk, two for motor vehicles, four for
intermodal, with ranges clustering in the 150-350 mile band.

The stream uses numpy's legacy ``RandomState`` (frozen algorithms), so a
given seed regenerates the exact same file on any platform.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .market_pipeline import CSV_COLUMNS
from .techno_params import default_energy_table

__all__ = ["DEFAULT_SEED", "DEFAULT_ROWS", "COMMODITY_PROFILES",
           "generate_market_rows", "write_markets_csv"]

DEFAULT_SEED = 20190451
DEFAULT_ROWS = 22_501

_WESTERN = ["BNSF", "CN", "CP", "UP"]
_EASTERN = ["CSX", "KCS", "NS"]

# Per-commodity sampling profile:
#   share        fraction of the population
#   cars_per_loco  normal(mu, sd): train cars per locomotive
#   locomotives  choices for the locomotive count
#   alpha        normal(mu, sd): loaded-car equivalents per tender
#   distance     lognormal(median, sigma) trip miles
#   gross_tons   normal(mu, sd): per-locomotive tonnage basis
#   speed_type   train-speed table row to use
COMMODITY_PROFILES: dict[str, dict] = {
    "Intermodal": dict(share=0.28, cars_per_loco=(118.0, 8.0), locomotives=(2, 3),
                       alpha=(10.4, 0.5), distance=(2000.0, 0.30),
                       gross_tons=(1600.0, 80.0), speed_type="Intermodal"),
    "Motor Vehicles": dict(share=0.07, cars_per_loco=(80.0, 8.0), locomotives=(2, 3),
                           alpha=(10.4, 0.5), distance=(1800.0, 0.30),
                           gross_tons=(1600.0, 80.0), speed_type="Automotive unit"),
    "Coal": dict(share=0.13, cars_per_loco=(14.6, 1.2), locomotives=(4, 5, 6),
                 alpha=(1.3, 0.10), distance=(1100.0, 0.35),
                 gross_tons=(2540.0, 120.0), speed_type="Coal unit"),
    "Agricultural & Foods": dict(share=0.13, cars_per_loco=(15.0, 1.5),
                                 locomotives=(3, 4, 5), alpha=(1.5, 0.12),
                                 distance=(900.0, 0.35), gross_tons=(1600.0, 80.0),
                                 speed_type="Grain unit"),
    "Chemical & Petroleum": dict(share=0.12, cars_per_loco=(15.0, 1.5),
                                 locomotives=(3, 4, 5), alpha=(1.5, 0.12),
                                 distance=(900.0, 0.35), gross_tons=(1600.0, 80.0),
                                 speed_type="Crude oil unit"),
    "Metals & Ores": dict(share=0.08, cars_per_loco=(13.0, 1.5), locomotives=(3, 4),
                          alpha=(1.6, 0.12), distance=(800.0, 0.35),
                          gross_tons=(1600.0, 80.0), speed_type="Manifest"),
    "Forest Products": dict(share=0.08, cars_per_loco=(33.0, 3.0), locomotives=(2, 3, 4),
                            alpha=(2.0, 0.20), distance=(1100.0, 0.35),
                            gross_tons=(1600.0, 80.0), speed_type="Manifest"),
    "Nonmetallic Products": dict(share=0.04, cars_per_loco=(14.0, 1.5), locomotives=(3, 4),
                                 alpha=(1.6, 0.12), distance=(700.0, 0.35),
                                 gross_tons=(1600.0, 80.0), speed_type="Manifest"),
    "Others": dict(share=0.07, cars_per_loco=(25.0, 3.0), locomotives=(2, 3, 4),
                   alpha=(3.0, 0.30), distance=(1200.0, 0.35),
                   gross_tons=(1600.0, 80.0), speed_type="Manifest"),
}


def _speed(table, railroad: str, train_type: str) -> float:
    try:
        return table.speed(railroad, train_type)
    except KeyError:
        return table.speed(railroad, "System")


def generate_market_rows(rows: int = DEFAULT_ROWS, seed: int = DEFAULT_SEED) -> list[dict]:
    """Draw the synthetic population; returns CSV-ready row dicts in a
    deterministic shuffled order."""
    rng = np.random.RandomState(seed)
    table = default_energy_table()

    # Exact per-commodity counts summing to the requested total.
    names = list(COMMODITY_PROFILES)
    shares = np.array([COMMODITY_PROFILES[name]["share"] for name in names])
    counts = np.floor(shares / shares.sum() * rows).astype(int)
    for i in range(rows - counts.sum()):
        counts[i % len(counts)] += 1

    records = []
    for name, count in zip(names, counts):
        profile = COMMODITY_PROFILES[name]
        for _ in range(count):
            region = "Western" if rng.random_sample() < 0.6 else "Eastern"
            railroad = (_WESTERN if region == "Western" else _EASTERN)[
                rng.randint(0, 4 if region == "Western" else 3)
            ]
            locomotives = int(profile["locomotives"][rng.randint(0, len(profile["locomotives"]))])
            mu, sd = profile["cars_per_loco"]
            cars_per_loco = max(rng.normal(mu, sd), 3.0)
            alpha = max(rng.normal(*profile["alpha"]), 0.5)
            # Keep at least one tender per locomotive plus two revenue cars feasible.
            length = max(int(round(cars_per_loco * locomotives)),
                         int(math.ceil(alpha * locomotives + 2.0)))
            median, sigma = profile["distance"]
            distance = float(np.clip(median * math.exp(rng.normal(0.0, sigma)), 150.0, 3200.0))
            gross = max(rng.normal(*profile["gross_tons"]), 300.0)
            demand = int(np.clip(600.0 * math.exp(rng.normal(0.0, 1.0)), 50.0, 20000.0))
            records.append({
                "railroad": railroad,
                "region": region,
                "commodity_group": name,
                "distance_mi": f"{distance:.1f}",
                "annual_demand_cars": str(demand),
                "train_length_cars": str(length),
                "num_locomotives": str(locomotives),
                "speed_mph": repr(_speed(table, railroad, profile["speed_type"])),
                "t0_h": "",
                "alpha": f"{alpha:.2f}",
                "gross_tons": f"{gross:.0f}",
                "h_override": "",
            })

    order = rng.permutation(len(records))
    rows_out = []
    for serial, idx in enumerate(order, start=1):
        row = dict(records[idx])
        row["market_id"] = f"M{serial:05d}"
        rows_out.append(row)
    return rows_out


def write_markets_csv(path, rows: list[dict]) -> None:
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(row[column] for column in CSV_COLUMNS) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
