import hashlib
import time

from tenderopt.market_pipeline import ingest_markets
from tenderopt.synthetic import (
    COMMODITY_PROFILES,
    DEFAULT_ROWS,
    DEFAULT_SEED,
    generate_market_rows,
    write_markets_csv,
)


def test_row_count_and_share_allocation():
    rows = generate_market_rows(rows=1000, seed=3)
    assert len(rows) == 1000
    groups = {row["commodity_group"] for row in rows}
    assert groups == set(COMMODITY_PROFILES)


def test_generation_is_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_markets_csv(a, generate_market_rows(rows=500, seed=9))
    write_markets_csv(b, generate_market_rows(rows=500, seed=9))
    assert a.read_bytes() == b.read_bytes()


def test_bundled_file_matches_generator(tmp_path, synthetic_path):
    regenerated = tmp_path / "regen.csv"
    write_markets_csv(regenerated, generate_market_rows(rows=DEFAULT_ROWS, seed=DEFAULT_SEED))
    assert hashlib.sha256(regenerated.read_bytes()).hexdigest() == \
        hashlib.sha256(synthetic_path.read_bytes()).hexdigest()


def test_full_population_ingests_quickly(synthetic_path):
    start = time.perf_counter()
    records = ingest_markets(synthetic_path)
    elapsed = time.perf_counter() - start
    assert len(records) == DEFAULT_ROWS
    assert elapsed < 1.0


def test_every_market_feasible(synthetic_path):
    # at least one tender group per locomotive must fit on every train
    for record in ingest_markets(synthetic_path):
        assert record.train_length_cars - record.alpha * record.locomotives >= 1.0
