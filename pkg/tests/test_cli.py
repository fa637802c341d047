"""Command-line surface: ingestion, commands, schemas, exit codes."""

import csv
import json
import math

import jsonschema
import numpy as np
import pytest

from polychoric import cli
from polychoric.datasets import (
    envious_pair_table,
    matrix_design_correlations,
    matrix_design_thresholds,
)
from polychoric.errors import CodeError, ConfigError, ParseError
from polychoric.model import ContingencyTable
from polychoric.pairwise import MISSING, OrdinalDataset
from polychoric.schemas import SCHEMAS, SCHEMA_VERSION
from polychoric.simulation import generate_multivariate


def write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(rows)
    return str(path)


@pytest.fixture
def fixture_table_csv(tmp_path):
    path = tmp_path / "pair.csv"
    cli.write_table(envious_pair_table(), path)
    return str(path)


@pytest.fixture
def raw_two_col_csv(tmp_path):
    rows = [["first", "second"], [1, 1], [1, 2], [2, 1], [2, 2]]
    return write_csv(tmp_path / "raw.csv", rows)


def run_json(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = cli.main(args + ["--out", str(out)])
    data = json.loads(out.read_text()) if out.exists() else None
    return code, data


class TestIngest:
    def test_raw_two_columns(self, raw_two_col_csv):
        data, warnings = cli.ingest(raw_two_col_csv, "raw")
        assert isinstance(data, OrdinalDataset)
        assert warnings == []
        table = cli.pairwise_table(data, 0, 1)
        assert np.array_equal(table.counts, np.ones((2, 2), dtype=int))

    def test_auto_detects_raw_and_table(self, raw_two_col_csv, fixture_table_csv):
        raw, _ = cli.ingest(raw_two_col_csv, "auto")
        assert isinstance(raw, OrdinalDataset)
        table, _ = cli.ingest(fixture_table_csv, "auto")
        assert isinstance(table, ContingencyTable)
        assert table.n == 725

    def test_ragged_row_reports_line_number(self, tmp_path):
        path = write_csv(tmp_path / "bad.csv", [["a", "b"], [1, 2], [1]])
        with pytest.raises(ParseError, match="line 3"):
            cli.ingest(path, "raw")

    def test_non_integer_code(self, tmp_path):
        path = write_csv(tmp_path / "bad.csv", [["a", "b"], [1.5, 2], [1, 1]])
        with pytest.raises(CodeError, match="line 2"):
            cli.ingest(path, "raw")

    def test_missing_values(self, tmp_path):
        path = write_csv(tmp_path / "na.csv", [["a", "b"], [1, "NA"], ["", 2], [2, 1], [1, 2]])
        data, _ = cli.ingest(path, "raw")
        assert data.codes[0, 1] == MISSING and data.codes[1, 0] == MISSING

    def test_empty_interior_category_warns(self, tmp_path):
        path = write_csv(tmp_path / "gap.csv", [["a", "b"], [1, 1], [2, 2], [4, 1], [1, 2]])
        data, warnings = cli.ingest(path, "raw")
        assert data.n_levels[0] == 4
        assert any("empty interior" in w for w in warnings)

    def test_codes_shifted_to_one(self, tmp_path):
        path = write_csv(tmp_path / "shift.csv", [["a", "b"], [0, 5], [1, 6], [0, 6], [1, 5]])
        data, warnings = cli.ingest(path, "raw")
        assert warnings == []
        assert set(np.unique(data.codes)) == {1, 2}

    def test_round_trip(self, tmp_path, fixture_table_csv):
        table, _ = cli.ingest(fixture_table_csv, "table")
        again = tmp_path / "again.csv"
        cli.write_table(table, again)
        table2, _ = cli.ingest(str(again), "table")
        assert np.array_equal(table.counts, table2.counts)


class TestEstimateCommand:
    def test_all_methods_report(self, fixture_table_csv, tmp_path):
        code, report = run_json(
            ["estimate", "--input", fixture_table_csv, "--method", "all", "--full-precision"],
            tmp_path,
        )
        assert code == 0
        jsonschema.validate(report, SCHEMAS["estimate"])
        assert report["schema_version"] == SCHEMA_VERSION
        by_method = {r["method"]: r for r in report["results"]}
        assert by_method["robust"]["rho"] == pytest.approx(-0.925, abs=0.01)
        assert by_method["ml"]["rho"] == pytest.approx(-0.618, abs=0.01)
        assert by_method["sample"]["rho"] == pytest.approx(-0.562, abs=0.005)
        assert by_method["ml"]["std_errors"]["rho"] == pytest.approx(0.0266, abs=0.005)
        assert by_method["two-step"]["std_errors"]["a"] is None or all(
            v is None for v in by_method["two-step"]["std_errors"]["a"]
        )

    def test_c_inf_equals_ml(self, fixture_table_csv, tmp_path):
        code_a, rep_a = run_json(
            ["estimate", "--input", fixture_table_csv, "--method", "robust", "--c", "inf",
             "--full-precision"], tmp_path, "a.json")
        code_b, rep_b = run_json(
            ["estimate", "--input", fixture_table_csv, "--method", "ml", "--full-precision"],
            tmp_path, "b.json")
        assert code_a == code_b == 0
        rho_a = rep_a["results"][0]["rho"]
        rho_b = rep_b["results"][0]["rho"]
        assert abs(rho_a - rho_b) <= 1e-6

    def test_csv_output(self, fixture_table_csv, tmp_path):
        out = tmp_path / "est.csv"
        code = cli.main(["estimate", "--input", fixture_table_csv, "--method", "ml",
                         "--csv", "--out", str(out)])
        assert code == 0
        rows = list(csv.reader(out.read_text().splitlines()))
        assert rows[0] == ["method", "parameter", "estimate", "std_error", "ci_lower", "ci_upper"]
        assert rows[1][0] == "ml" and rows[1][1] == "rho"
        assert float(rows[1][2]) == pytest.approx(-0.618, abs=0.01)

    def test_raw_input(self, raw_two_col_csv, tmp_path):
        code, report = run_json(
            ["estimate", "--input", raw_two_col_csv, "--method", "all"], tmp_path)
        assert code == 0
        sample = next(r for r in report["results"] if r["method"] == "sample")
        assert sample["rho"] == pytest.approx(0.0, abs=1e-9)

    def test_missing_file_is_input_error(self, tmp_path):
        assert cli.main(["estimate", "--input", str(tmp_path / "nope.csv")]) == 1

    def test_fit_failure_is_exit_2(self, tmp_path):
        path = write_csv(tmp_path / "empty_cat.csv", [[5, 3], [0, 0]])
        assert cli.main(["estimate", "--input", path, "--method", "ml"]) == 2

    def test_bad_alpha_is_input_error(self, fixture_table_csv):
        assert cli.main(["estimate", "--input", fixture_table_csv, "--alpha", "1.5"]) == 1


class TestResidualsCommand:
    def test_fixture_diagnostics(self, fixture_table_csv, tmp_path):
        code, report = run_json(
            ["residuals", "--input", fixture_table_csv, "--full-precision"], tmp_path)
        assert code == 0
        jsonschema.validate(report, SCHEMAS["residuals"])
        pr = np.asarray(report["pearson_residuals"])
        assert pr[4, 2] == pytest.approx(35.01, abs=3.0)
        flagged = {(c["x"], c["y"]) for c in report["flagged_cells"]}
        assert len(flagged) == 12

    def test_extreme_threshold_keeps_six_cells(self, fixture_table_csv, tmp_path):
        code, report = run_json(
            ["residuals", "--input", fixture_table_csv, "--flag-threshold", "1000"], tmp_path)
        assert code == 0
        flagged = {(c["x"], c["y"]) for c in report["flagged_cells"]}
        assert flagged == {(1, 1), (1, 2), (2, 1), (4, 5), (5, 4), (5, 5)}

    def test_model_generated_table_is_clean(self, tmp_path):
        from polychoric.model import Theta, cell_probs_array

        th = Theta(rho=0.4, a=np.array([-0.8, 0.5]), b=np.array([-0.5, 0.8]))
        counts = np.rint(cell_probs_array(th) * 100000).astype(int)
        path = write_csv(tmp_path / "model.csv", counts.tolist())
        code, report = run_json(["residuals", "--input", path, "--full-precision"], tmp_path)
        assert code == 0
        assert report["flagged_cells"] == []
        assert np.max(np.abs(np.asarray(report["pearson_residuals"]))) < 0.05


class TestMatrixCommand:
    @pytest.fixture
    def raw_matrix_csv(self, tmp_path):
        data = generate_multivariate(
            matrix_design_correlations()[:3, :3], matrix_design_thresholds(),
            epsilon=0.0, n=1500, seed=13)
        rows = [["v1", "v2", "v3"]] + data.codes.tolist()
        return write_csv(tmp_path / "items.csv", rows)

    def test_matrix_report(self, raw_matrix_csv, tmp_path):
        code, report = run_json(
            ["matrix", "--input", raw_matrix_csv, "--method", "all", "--full-precision"],
            tmp_path)
        assert code == 0
        jsonschema.validate(report, SCHEMAS["matrix"])
        assert report["items"] == ["v1", "v2", "v3"]
        assert report["difference_matrix"] is not None
        methods = {r["method"] for r in report["results"]}
        assert methods == {"ml", "robust"}
        est = np.asarray(report["results"][0]["estimates"])
        assert np.allclose(np.diag(est), 1.0)

    def test_two_items_match_estimate_command(self, tmp_path):
        data = generate_multivariate(
            matrix_design_correlations()[:2, :2], matrix_design_thresholds(),
            epsilon=0.0, n=800, seed=4)
        rows = [["x", "y"]] + data.codes.tolist()
        path = write_csv(tmp_path / "two.csv", rows)
        code_m, rep_m = run_json(
            ["matrix", "--input", path, "--method", "robust", "--full-precision"],
            tmp_path, "m.json")
        code_e, rep_e = run_json(
            ["estimate", "--input", path, "--method", "robust", "--full-precision"],
            tmp_path, "e.json")
        assert code_m == code_e == 0
        rho_m = rep_m["results"][0]["estimates"][0][1]
        rho_e = rep_e["results"][0]["rho"]
        assert rho_m == pytest.approx(rho_e, abs=1e-9)

    def test_table_input_rejected(self, fixture_table_csv):
        assert cli.main(["matrix", "--input", fixture_table_csv]) == 1


class TestSimulateCommand:
    def study_config(self, tmp_path, **overrides):
        config = {
            "design": {"rho": 0.5, "thresholds_x": [-1.5, -0.5, 0.5, 1.5],
                       "thresholds_y": [-1.5, -0.5, 0.5, 1.5]},
            "misspecifying": {"kind": "bivariate-normal", "mean": [2, -2],
                              "variances": [0.2, 0.2], "covariance": 0.0},
            "epsilon": [0.0, 0.1],
            "n": 300,
            "replications": 3,
            "methods": ["twostep", "sample"],
            "alpha": 0.05,
            "seed": 3,
        }
        config.update(overrides)
        path = tmp_path / "study.json"
        path.write_text(json.dumps(config))
        return str(path)

    def test_runs_and_validates(self, tmp_path):
        path = self.study_config(tmp_path)
        code, report = run_json(["simulate", "--config", path, "--full-precision"], tmp_path)
        assert code == 0
        jsonschema.validate(report, SCHEMAS["simulate"])
        assert len(report["studies"]) == 2
        assert {row["method"] for row in report["studies"][0]["rows"]} == {"twostep", "sample"}

    def test_deterministic(self, tmp_path):
        path = self.study_config(tmp_path)
        _, rep1 = run_json(["simulate", "--config", path, "--full-precision"], tmp_path, "r1.json")
        _, rep2 = run_json(["simulate", "--config", path, "--full-precision"], tmp_path, "r2.json")
        rep1.pop("config"); rep2.pop("config")
        assert rep1 == rep2

    def test_zero_replications_is_config_error(self, tmp_path, capsys):
        path = self.study_config(tmp_path, replications=0)
        assert cli.main(["simulate", "--config", path]) == 1
        assert "replications" in capsys.readouterr().err

    def test_unknown_key_named(self, tmp_path, capsys):
        path = self.study_config(tmp_path, typo_key=1)
        assert cli.main(["simulate", "--config", path]) == 1
        assert "typo_key" in capsys.readouterr().err

    def test_epsilon_out_of_range_names_entry(self, tmp_path, capsys):
        path = self.study_config(tmp_path, epsilon=[0.7])
        assert cli.main(["simulate", "--config", path]) == 1
        assert "epsilon[0]" in capsys.readouterr().err

    def test_bundled_config_parses(self, tmp_path):
        from importlib import resources

        bundled = resources.files("polychoric") / "studies" / "partial_misspecification.json"
        config = json.loads(bundled.read_text())
        assert config["design"]["rho"] == 0.5
        assert config["replications"] == 200
        # run a miniature version of it through the CLI
        config["replications"] = 2
        config["epsilon"] = [0.0]
        config["methods"] = ["sample"]
        path = tmp_path / "mini.json"
        path.write_text(json.dumps(config))
        code, report = run_json(["simulate", "--config", str(path)], tmp_path)
        assert code == 0 and report["studies"][0]["rows"][0]["replications_used"] == 2

    def test_csv_rows(self, tmp_path):
        path = self.study_config(tmp_path, epsilon=0.0, methods=["sample"])
        out = tmp_path / "sim.csv"
        assert cli.main(["simulate", "--config", path, "--csv", "--out", str(out)]) == 0
        rows = list(csv.reader(out.read_text().splitlines()))
        assert rows[0][0] == "epsilon" and rows[1][1] == "sample"


class TestNumberFormatting:
    def test_six_significant_digits_default(self, fixture_table_csv, tmp_path):
        code, report = run_json(
            ["estimate", "--input", fixture_table_csv, "--method", "ml"], tmp_path)
        assert code == 0
        rho = report["results"][0]["rho"]
        assert rho == float(f"{rho:.6g}")

    def test_infinity_serialized_as_string(self, fixture_table_csv, tmp_path):
        code, report = run_json(
            ["estimate", "--input", fixture_table_csv, "--method", "robust", "--c", "inf"],
            tmp_path)
        assert code == 0
        assert report["results"][0]["c"] == "inf"
        assert not math.isnan(report["results"][0]["rho"])
