import json
import subprocess
import sys

import pytest

from tenderopt.cli import main

COAL_FLAGS = [
    "--distance-mi", "1400", "--t0-h", "70.7", "--train-length", "73",
    "--annual-demand", "1000", "--alpha", "1.3", "--tender-range-mi", "320",
    "--holding-cost", "9.5", "--locomotives", "5",
    "--stop-h", "3.73", "--stop-energy-cost", "2240",
]


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def flatten(node, prefix=""):
    flat = {}
    if isinstance(node, dict):
        for key, value in node.items():
            flat.update(flatten(value, f"{prefix}.{key}" if prefix else key))
    else:
        flat[prefix] = node
    return flat


class TestOptimize:
    def test_coal_corridor_report(self, capsys):
        code, out, _ = run_cli(capsys, "optimize", *COAL_FLAGS, "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["optimum"]["per_locomotive"] == 1.0
        assert report["optimum"]["range_mi"] == 320.0
        assert report["optimum"]["stops"] == 4
        assert report["per_train"]["tenders"] == 4
        assert report["continuous"]["boundary"] == "interior"

    def test_json_and_csv_values_identical(self, capsys):
        code, json_out, _ = run_cli(capsys, "optimize", *COAL_FLAGS, "--format", "json")
        assert code == 0
        code, csv_out, _ = run_cli(capsys, "optimize", *COAL_FLAGS, "--format", "csv")
        assert code == 0
        flat = flatten(json.loads(json_out))
        lines = csv_out.strip().splitlines()
        assert lines[0] == "key,value"
        csv_values = dict(line.split(",", 1) for line in lines[1:])
        assert set(csv_values) == set(flat)
        for key, value in flat.items():
            rendered = ("true" if value else "false") if isinstance(value, bool) \
                else str(value)
            assert csv_values[key] == rendered, key

    def test_table_values_match_json(self, capsys):
        _, json_out, _ = run_cli(capsys, "optimize", *COAL_FLAGS, "--format", "json")
        _, table_out, _ = run_cli(capsys, "optimize", *COAL_FLAGS, "--format", "table")
        flat = flatten(json.loads(json_out))
        rendered = dict(line.split(None, 1) for line in table_out.strip().splitlines())
        assert rendered["optimum.total_cost"] == str(flat["optimum.total_cost"])
        assert rendered["optimum.range_mi"] == str(flat["optimum.range_mi"])

    def test_missing_flag_names_it(self, capsys):
        code, _, err = run_cli(capsys, "optimize", "--distance-mi", "100",
                               "--t0-h", "10", "--format", "json")
        assert code == 2
        assert err.startswith("tenderopt: error:")
        assert "--train-length" in err

    def test_speed_t0_exclusivity(self, capsys):
        code, _, err = run_cli(capsys, "optimize", *COAL_FLAGS,
                               "--speed-mph", "21", "--format", "json")
        assert code == 2 and "exactly one" in err

    def test_per_train_granularity(self, capsys):
        _, out, _ = run_cli(capsys, "optimize", *COAL_FLAGS,
                            "--granularity", "per-train", "--format", "json")
        report = json.loads(out)
        assert report["optimum"]["tenders"] == 4


class TestCurve:
    def test_totals_increase_for_coal(self, capsys):
        code, out, _ = run_cli(capsys, "curve", *COAL_FLAGS,
                               "--m-from", "1", "--m-to", "10", "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        totals = [row["total_cost"] for row in rows]
        assert len(totals) == 10
        assert all(a < b for a, b in zip(totals, totals[1:]))

    def test_components_sum_to_total(self, capsys):
        _, out, _ = run_cli(capsys, "curve", *COAL_FLAGS, "--format", "json")
        for row in json.loads(out)["rows"]:
            parts = (row["cost_locomotive"] + row["cost_tender"] + row["cost_charging"]
                     + row["cost_delay"] + row["cost_constant"])
            assert abs(parts - row["total_cost"]) <= 1e-6 * row["total_cost"]

    def test_single_point_range(self, capsys):
        _, out, _ = run_cli(capsys, "curve", *COAL_FLAGS,
                            "--m-from", "3", "--m-to", "3", "--format", "json")
        rows = json.loads(out)["rows"]
        assert len(rows) == 1 and rows[0]["per_locomotive"] == 3.0

    def test_out_of_range_rejected(self, capsys):
        code, _, err = run_cli(capsys, "curve", *COAL_FLAGS,
                               "--m-from", "1", "--m-to", "99", "--format", "json")
        assert code == 2 and "feasible" in err


class TestBatchAndSweep:
    @pytest.fixture()
    def small_markets(self, tmp_path):
        from tenderopt.synthetic import generate_market_rows, write_markets_csv
        path = tmp_path / "markets.csv"
        write_markets_csv(path, generate_market_rows(rows=60, seed=4))
        return path

    def test_batch_writes_outputs_and_summary(self, capsys, small_markets, tmp_path):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(capsys, "batch", "--markets", str(small_markets),
                               "--out-dir", str(out_dir))
        assert code == 0
        assert "markets processed: 60" in out
        assert (out_dir / "results.csv").exists()
        assert (out_dir / "aggregates.json").exists()

    def test_sweep_emits_scenario_blocks(self, capsys, small_markets, tmp_path):
        out_dir = tmp_path / "out"
        code, out, _ = run_cli(capsys, "sweep", "--markets", str(small_markets),
                               "--out-dir", str(out_dir),
                               "--delay-factors", "0.5,0.75,1,1.5,2")
        assert code == 0
        assert "scenarios:         5" in out
        payload = json.loads((out_dir / "aggregates.json").read_text())
        assert len(payload["scenarios"]) == 5

    def test_missing_input_is_io_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "batch", "--markets", str(tmp_path / "nope.csv"),
                               "--out-dir", str(tmp_path / "out"))
        assert code == 3
        assert err.startswith("tenderopt: io-error:")


class TestCompareDiesel:
    def test_flags_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare-diesel", "--distance-mi", "1400", "--t0-h", "70.7",
            "--train-length", "73", "--annual-demand", "1000", "--alpha", "1.3",
            "--locomotives", "5", "--commodity", "Coal", "--region", "Western",
            "--gross-tons", "2540", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["battery"]["per_locomotive"] == 1
        assert report["diesel"]["total_cost"] > 0
        assert isinstance(report["battery_cheaper_total"], bool)

    def test_market_file_mode(self, capsys, tmp_path):
        from tenderopt.market_pipeline import CSV_COLUMNS
        path = tmp_path / "m.csv"
        path.write_text(",".join(CSV_COLUMNS) + "\n"
                        "m1,BNSF,Western,Coal,1400,1000,73,5,,70.7,1.3,2540,\n")
        code, out, _ = run_cli(capsys, "compare-diesel", "--markets", str(path),
                               "--market-id", "m1", "--format", "json")
        assert code == 0
        assert json.loads(out)["market_id"] == "m1"

    def test_unknown_market_id(self, capsys, tmp_path):
        from tenderopt.market_pipeline import CSV_COLUMNS
        path = tmp_path / "m.csv"
        path.write_text(",".join(CSV_COLUMNS) + "\n"
                        "m1,BNSF,Western,Coal,1400,1000,73,5,,70.7,1.3,2540,\n")
        code, _, err = run_cli(capsys, "compare-diesel", "--markets", str(path),
                               "--market-id", "zz", "--format", "json")
        assert code == 2 and "zz" in err


class TestDerive:
    def test_values_with_formulas(self, capsys):
        code, out, _ = run_cli(capsys, "derive", "--format", "table")
        assert code == 0
        assert "3.733333333333334" in out      # hours per charge stop
        assert "2221.8" in out                 # USD per tender per stop
        assert "235.6164383561644" in out      # locomotive hourly
        assert "56.590939614794046" in out     # battery hourly
        assert "= 14.0 MWh x 0.8 / 3.0 MW =" in out

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "derive", "--format", "json")
        report = json.loads(out)
        assert report["stop_time_h"]["value"] == pytest.approx(3.7333333333333334)
        assert "formula" in report["battery_hourly_usd"]

    def test_charger_override(self, capsys):
        _, out, _ = run_cli(capsys, "derive", "--charger-power-mw", "0.4",
                            "--format", "json")
        assert json.loads(out)["stop_time_h"]["value"] == pytest.approx(28.0)


def test_console_entry_point_exit_codes(tmp_path):
    ok = subprocess.run(
        [sys.executable, "-m", "tenderopt.cli", "optimize", *COAL_FLAGS,
         "--format", "json"],
        capture_output=True, text=True)
    assert ok.returncode == 0
    bad = subprocess.run(
        [sys.executable, "-m", "tenderopt.cli", "optimize", "--alpha", "1.0"],
        capture_output=True, text=True)
    assert bad.returncode == 2


def test_auto_format_is_csv_when_piped(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "tenderopt.cli", "optimize", *COAL_FLAGS],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert result.stdout.splitlines()[0] == "key,value"
