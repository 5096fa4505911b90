#!/usr/bin/env python3
"""Network-wide study on the synthetic market population.

Runs the default scenario plus the delay-cost, charging-speed, and
capital-exclusion sensitivity grids, writing results and aggregates under
the chosen output directory.
"""
import argparse
from pathlib import Path

from tenderopt.market_pipeline import ScenarioSpec, run_batch
from tenderopt.techno_params import TechInputs

SCENARIOS = [
    ScenarioSpec(),
    ScenarioSpec(delay_factor=0.5),
    ScenarioSpec(delay_factor=0.75),
    ScenarioSpec(delay_factor=1.5),
    ScenarioSpec(delay_factor=2.0),
    ScenarioSpec(charger_power_mw=0.4),
    ScenarioSpec(swap_h=0.5),
    ScenarioSpec(capital_costs="excluded"),
]


def main() -> None:
    root = Path(__file__).resolve().parent.parent
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--markets", default=str(root / "data" / "synthetic_markets.csv"))
    parser.add_argument("--out-dir", default=str(root / "out" / "network_study"))
    args = parser.parse_args()
    summary = run_batch(args.markets, args.out_dir, TechInputs(), SCENARIOS)
    print(f"markets processed: {summary.markets}")
    print(f"scenarios:         {summary.scenarios}")
    print(f"infeasible rows:   {summary.infeasible}")
    print(f"results:           {summary.results_path}")
    print(f"aggregates:        {summary.aggregates_path}")


if __name__ == "__main__":
    main()
