#!/usr/bin/env python3
"""Regenerate the bundled synthetic market population.

The default seed and row count reproduce data/synthetic_markets.csv
byte for byte; pass --seed/--rows for alternative populations.
"""
import argparse
from pathlib import Path

from tenderopt.synthetic import DEFAULT_ROWS, DEFAULT_SEED, generate_market_rows, write_markets_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=DEFAULT_ROWS)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent
                                             / "data" / "synthetic_markets.csv"))
    args = parser.parse_args()
    rows = generate_market_rows(rows=args.rows, seed=args.seed)
    write_markets_csv(args.out, rows)
    print(f"wrote {len(rows)} markets to {args.out} (seed {args.seed})")


if __name__ == "__main__":
    main()
