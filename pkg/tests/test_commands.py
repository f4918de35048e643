import json
import re

import pandas as pd
import pytest
from typer.testing import CliRunner

from helpers.output_helper import table_from_csv
from main import app
from models.models import TABLE_COLUMNS

runner = CliRunner()


def _m_star(stdout: str) -> int:
    match = re.search(r"m\*=(\d+) maxerr_over_eps=", stdout)
    assert match, stdout
    return int(match.group(1))


# ============================================================
# solve
# ============================================================
class TestSolveCommand:
    def test_summary_for_the_first_table_cell(self):
        result = runner.invoke(app, ["solve", "--problem", "test", "--delta", "0.1", "--eps", "1e-2", "--order", "1"])
        assert result.exit_code == 0, result.output
        assert 32 <= _m_star(result.stdout) <= 34
        assert "oracle=closed_form" in result.stdout
        maxerr_over_eps = float(re.search(r"maxerr_over_eps=([0-9.eE+-]+)", result.stdout).group(1))
        assert maxerr_over_eps <= 1.0

    def test_trajectory_json(self, tmp_path):
        path = tmp_path / "trajectory.json"
        result = runner.invoke(
            app, ["solve", "--problem", "exp", "--eps", "1e-4", "--order", "2", "--output", str(path)]
        )
        assert result.exit_code == 0, result.output
        document = json.loads(path.read_text())
        mesh = document["mesh"]
        assert mesh[0] == 0.0 and mesh[-1] == 1.0
        assert all(a < b for a, b in zip(mesh, mesh[1:]))
        assert len(document["steps"]) == len(mesh) - 1
        assert document["order"] == 2
        assert document["total_f_evals"] == 15 * len(document["steps"])

    def test_trajectory_csv(self, tmp_path):
        path = tmp_path / "trajectory.csv"
        result = runner.invoke(
            app, ["solve", "--problem", "rotation", "--eps", "1e-3", "--output", str(path), "--format", "csv"]
        )
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["x", "y0", "y1"]
        assert frame["x"].iloc[0] == 0.0
        assert frame["x"].iloc[-1] == 2.0

    @pytest.mark.parametrize(
        "arguments",
        [
            ["--eps", "0"],
            ["--eps", "1.5"],
            ["--eps", "1e-2", "--order", "0"],
            ["--eps", "1e-2", "--problem", "vanderpol"],
            ["--eps", "1e-2", "--problem", "rotation", "--delta", "0.1"],
            ["--eps", "1e-2", "--aux-rule", "fixed"],
            ["--eps", "1e-2", "--max-steps", "100000000"],
        ],
    )
    def test_invalid_arguments_exit_with_2(self, arguments):
        result = runner.invoke(app, ["solve", *arguments])
        assert result.exit_code == 2

    def test_start_on_the_singularity_exits_with_3(self):
        # 1 + 1e-30 rounds to 1, where f is undefined
        result = runner.invoke(app, ["solve", "--problem", "test", "--delta", "1e-30", "--eps", "1e-2"])
        assert result.exit_code == 3

    def test_step_cap_exits_with_3(self):
        result = runner.invoke(app, ["solve", "--problem", "test", "--eps", "1e-4", "--max-steps", "5"])
        assert result.exit_code == 3


# ============================================================
# table
# ============================================================
class TestTableCommand:
    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "table.csv"
        result = runner.invoke(
            app,
            ["table", "--problem", "zero", "--epsilons", "1e-2,1e-3", "--orders", "1,2", "--output", str(path)],
        )
        assert result.exit_code == 0, result.output
        text = path.read_text()
        assert text.splitlines()[0] == ",".join(TABLE_COLUMNS)
        rows = table_from_csv(text)
        assert len(rows) == 2 * 2 * 2
        assert [(row.delta, row.eps, row.r) for row in rows] == sorted((row.delta, row.eps, row.r) for row in rows)
        for row in rows:
            assert row.m_star > 0
            assert row.maxerr_over_eps == 0.0
            assert row.equidist_over_eps == 0.0
            assert row.f_evals_adaptive == (2 * row.r**2 + 3 * row.r + 1) * row.m_star

    def test_json_rows(self, tmp_path):
        path = tmp_path / "table.json"
        result = runner.invoke(
            app,
            [
                "table",
                "--deltas", "0.1",
                "--epsilons", "1e-2",
                "--orders", "1",
                "--format", "json",
                "--output", str(path),
            ],
        )
        assert result.exit_code == 0, result.output
        (row,) = json.loads(path.read_text())
        assert 32 <= row["m_star"] <= 34
        assert row["maxerr_over_eps"] <= 1.0
        assert row["equidist_over_eps"] > row["maxerr_over_eps"]
        assert row["error"] == ""
        assert row["equidist_equal_cost_over_eps"] is None

    def test_equal_cost_run_is_opt_in(self, tmp_path):
        path = tmp_path / "table.json"
        result = runner.invoke(
            app,
            [
                "table",
                "--deltas", "0.1",
                "--epsilons", "1e-2",
                "--orders", "1",
                "--equal-cost",
                "--format", "json",
                "--output", str(path),
            ],
        )
        assert result.exit_code == 0, result.output
        (row,) = json.loads(path.read_text())
        assert row["equidist_equal_cost_over_eps"] > row["maxerr_over_eps"]

    def test_parallel_cells_match_serial_ones(self, tmp_path):
        grid = ["table", "--deltas", "0.1,0.05", "--epsilons", "1e-2,1e-3", "--orders", "1,2"]
        frames = []
        for jobs in ("1", "3"):
            path = tmp_path / f"table-{jobs}.csv"
            result = runner.invoke(app, [*grid, "--jobs", jobs, "--output", str(path)])
            assert result.exit_code == 0, result.output
            frames.append(pd.read_csv(path, float_precision="round_trip").drop(columns=["wall_time_ms"]))
        serial, parallel = frames
        assert len(serial) == 8
        pd.testing.assert_frame_equal(serial, parallel)

    def test_failed_cells_stay_in_the_table(self, tmp_path):
        path = tmp_path / "table.csv"
        result = runner.invoke(
            app,
            ["table", "--deltas", "1e-30,0.1", "--epsilons", "1e-2", "--orders", "1", "--output", str(path)],
        )
        assert result.exit_code == 0, result.output
        failed, succeeded = table_from_csv(path.read_text())
        assert failed.m_star == 0
        assert failed.maxerr_over_eps != failed.maxerr_over_eps
        assert succeeded.m_star > 0

    def test_every_cell_failing_exits_with_3(self, tmp_path):
        result = runner.invoke(
            app,
            ["table", "--deltas", "1e-30", "--epsilons", "1e-2", "--orders", "1,2", "--output", str(tmp_path / "t.csv")],
        )
        assert result.exit_code == 3

    @pytest.mark.parametrize(
        "arguments",
        [["--orders", "one"], ["--epsilons", ""], ["--orders", "0"], ["--jobs", "0"]],
    )
    def test_invalid_grids_exit_with_2(self, arguments):
        result = runner.invoke(app, ["table", *arguments])
        assert result.exit_code == 2


# ============================================================
# order-check
# ============================================================
class TestOrderCheckCommand:
    def test_global_slopes(self, tmp_path):
        path = tmp_path / "fits.csv"
        result = runner.invoke(
            app,
            ["order-check", "--problem", "exp", "--orders", "1,2", "--m-list", "16,32,64,128", "--output", str(path)],
        )
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(path)
        assert list(frame["order"]) == [1, 2]
        for _, fit in frame.iterrows():
            assert fit["slope"] == pytest.approx(fit["expected"], abs=0.15)

    def test_local_slopes(self, tmp_path):
        path = tmp_path / "fits.json"
        result = runner.invoke(
            app,
            [
                "order-check",
                "--orders", "1,2,3",
                "--mode", "local",
                "--m-list", "8,16,32,64",
                "--format", "json",
                "--output", str(path),
            ],
        )
        assert result.exit_code == 0, result.output
        for fit in json.loads(path.read_text()):
            assert fit["mode"] == "local"
            assert fit["slope"] == pytest.approx(fit["expected"], abs=0.25)
        assert [fit["expected"] for fit in json.loads(path.read_text())] == [2.0, 3.0, 5.0]

    def test_needs_three_scales(self):
        result = runner.invoke(app, ["order-check", "--m-list", "16,32"])
        assert result.exit_code == 2
