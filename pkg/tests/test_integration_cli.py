"""
Integration tests for the pconvex command line
"""
import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from pconvex.cli import main
from pconvex.models import BodyFile
from pconvex.utils.performance_monitor import get_performance_monitor


BASELINE_FILE = Path(__file__).parent / "data" / "diameter_baseline.json"


def last_json_line(text):
    lines = [line for line in text.splitlines() if line.strip()]
    return json.loads(lines[-1])


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestGeometryCommands:
    """Test cases for gauge, membership and opnorm"""

    def test_gauge_plain(self, body_file, capsys):
        assert main(["gauge", str(body_file), "0.25,0.25"]) == 0
        assert capsys.readouterr().out == "1\n0 +1 0.25\n1 +1 0.25\n"

    def test_gauge_zero(self, body_file, capsys):
        assert main(["gauge", str(body_file), "0,0"]) == 0
        assert capsys.readouterr().out == "0\n"

    def test_gauge_json(self, body_file, capsys):
        assert main(["gauge", str(body_file), "1,1", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value"] == pytest.approx(4.0)
        assert payload["witness"]["terms"][0]["lambda"] == 1.0

    def test_gauge_negative_vector(self, body_file, capsys):
        assert main(["gauge", str(body_file), "--", "-0.25,0.25"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert float(lines[0]) == pytest.approx(1.0)
        assert lines[1] == "0 -1 0.25"

    def test_gauge_dimension_mismatch(self, body_file, capsys):
        assert main(["gauge", str(body_file), "0.25,0.25,0.25"]) == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        error = last_json_line(captured.err)
        assert error["error"] == "InputValidationError"
        assert error["details"]["error_code"] == "DIMENSION_MISMATCH"
        assert set(error) == {"error", "message", "details", "run_id", "timestamp"}

    def test_gauge_budget_exceeded(self, three_point_body_file, capsys, monkeypatch):
        monkeypatch.setenv("PCONVEX_GAUGE_BUDGET", "3")
        assert main(["gauge", str(three_point_body_file), "0.5,0.5"]) == 3
        error = last_json_line(capsys.readouterr().err)
        assert error["error"] == "BudgetExceededError"
        assert error["details"]["required"] == 15

    def test_membership(self, body_file, capsys):
        assert main(["membership", str(body_file), "0.3,0.3"]) == 0
        assert capsys.readouterr().out == "outside\n"
        assert main(["membership", str(body_file), "0.25,0.25", "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["inside"] is True

    def test_opnorm(self, body_file, write_json_file, capsys):
        map_file = write_json_file("map.json", {"dim": 2, "matrix": [[2.0, 0.0], [0.0, 1.0]]})
        assert main(["opnorm", str(map_file), str(body_file), str(body_file)]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(2.0)

    def test_missing_body_file(self, tmp_path, capsys):
        assert main(["gauge", str(tmp_path / "absent.json"), "1,0"]) == 2
        assert last_json_line(capsys.readouterr().err)["details"]["error_code"] == "MISSING_FILE"

    def test_invalid_body_file(self, write_json_file, capsys):
        path = write_json_file("bad.json", {"p": 2.0, "dim": 2, "generators": [[1.0, 0.0]]})
        assert main(["gauge", str(path), "1,0"]) == 2
        assert last_json_line(capsys.readouterr().err)["error"] == "ValidationError"


class TestReduceCommand:
    """Test cases for the reduce subcommand"""

    def test_three_terms_to_two(self, three_point_body_file, write_json_file, capsys):
        comb = write_json_file("comb.json", {"dim": 2, "terms": [
            {"index": 0, "sign": 1, "lambda": 0.05},
            {"index": 1, "sign": 1, "lambda": 0.05},
            {"index": 2, "sign": 1, "lambda": 0.05}
        ]})
        assert main(["reduce", str(three_point_body_file), str(comb)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["term_count"] == 2
        assert [t["index"] for t in payload["combination"]["terms"]] == [0, 1]
        assert payload["weight_after"] <= payload["weight_before"] + 1e-12

    def test_already_reduced(self, three_point_body_file, write_json_file, capsys):
        comb = write_json_file("comb.json", {"dim": 2, "terms": [{"index": 2, "sign": 1, "lambda": 1.0}]})
        assert main(["reduce", str(three_point_body_file), str(comb)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["combination"]["terms"] == [{"index": 2, "sign": 1, "lambda": 1.0}]
        assert payload["iterations"] == 0

    def test_heavy_combination(self, three_point_body_file, write_json_file, capsys):
        comb = write_json_file("comb.json", {"dim": 2, "terms": [
            {"index": 0, "sign": 1, "lambda": 0.5},
            {"index": 1, "sign": 1, "lambda": 0.5}
        ]})
        assert main(["reduce", str(three_point_body_file), str(comb)]) == 2
        assert last_json_line(capsys.readouterr().err)["error"] == "CombinationValidationError"

    def test_zero_with_output_file(self, three_point_body_file, write_json_file, tmp_path):
        comb = write_json_file("comb.json", {"dim": 2, "terms": [
            {"index": 2, "sign": 1, "lambda": 0.2},
            {"index": 2, "sign": -1, "lambda": 0.2}
        ]})
        out = tmp_path / "reduced.json"
        assert main(["reduce", str(three_point_body_file), str(comb), "--zero",
                     "--output", str(out)]) == 0
        assert json.loads(out.read_text(encoding="utf-8"))["term_count"] == 2
        manifest = json.loads((tmp_path / "reduced.json.manifest.json").read_text(encoding="utf-8"))
        assert manifest["command"] == "reduce"
        assert manifest["parameters"]["zero"] is True


class TestBodiesAndDistance:
    """Test cases for make-body and distance"""

    def test_make_lp_body(self, tmp_path):
        out = tmp_path / "lp.json"
        assert main(["make-body", "--lp", "3", "0.5", "--output", str(out)]) == 0
        body = BodyFile.load(out)
        assert body.dim == 3
        assert body.name == "l_0.5^3"

    def test_make_gluskin_body_is_reproducible(self, capsys):
        assert main(["make-body", "--gluskin", "2", "0.5", "--seed", "42"]) == 0
        first = capsys.readouterr().out
        assert main(["make-body", "--gluskin", "2", "0.5", "--seed", "42"]) == 0
        assert capsys.readouterr().out == first
        assert len(json.loads(first)["generators"]) == 4

    def test_make_gluskin_needs_seed(self, capsys):
        assert main(["make-body", "--gluskin", "2", "0.5"]) == 2
        assert last_json_line(capsys.readouterr().err)["details"]["error_code"] == "SEED_REQUIRED"

    def test_distance_same_body(self, body_file, capsys):
        assert main(["distance", str(body_file), str(body_file), "--seed", "0",
                     "--budget", "50", "--restarts", "1"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(1.0, abs=1e-6)

    def test_distance_with_initial_map(self, body_file, write_json_file, capsys):
        stretched = write_json_file("stretched.json", {"p": 0.5, "dim": 2,
                                                       "generators": [[3.0, 0.0], [0.0, 1.0]]})
        T0 = write_json_file("t0.json", {"dim": 2, "matrix": [[3.0, 0.0], [0.0, 1.0]]})
        assert main(["distance", str(body_file), str(stretched), "--seed", "1", "--budget", "40",
                     "--restarts", "0", "--initial-map", str(T0), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["upper_bound"] <= 1.05
        assert len(payload["restart_values"]) == 3

    def test_distance_needs_seed(self, body_file):
        assert main(["distance", str(body_file), str(body_file)]) == 2


class TestExperimentCommands:
    """Test cases for the experiment tables"""

    def test_volume_close_to_closed_form(self, capsys):
        assert main(["experiment", "volume", "--n", "2", "--p", "0.5", "--samples", "200000",
                     "--seed", "1"]) == 0
        row = read_csv(capsys.readouterr().out)[0]
        assert abs(float(row["mean"]) - 2.0 / 3.0) <= 4.0 * float(row["std_error"])
        assert float(row["exact"]) == pytest.approx(2.0 / 3.0)
        assert float(row["upper_bound"]) == pytest.approx(1.0)

    def test_csv_byte_identical_across_runs_and_threads(self, tmp_path):
        outputs = []
        for k, threads in enumerate(["1", "1", "4"]):
            out = tmp_path / f"volume_{k}.csv"
            assert main(["experiment", "volume", "--samples", "150000", "--seed", "7",
                         "--threads", threads, "--output", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
        assert outputs[0].startswith(b"n,p,samples,hits,mean,std_error,exact,upper_bound\n")
        assert b"\r\n" not in outputs[0]

    def test_manifest_written(self, tmp_path):
        out = tmp_path / "axioms.json"
        assert main(["experiment", "axioms", "--seed", "3", "--samples", "100", "--out", "json",
                     "--output", str(out)]) == 0
        table = json.loads(out.read_text(encoding="utf-8"))
        assert table["rows"][0]["passed"] is True
        manifest = json.loads((tmp_path / "axioms.json.manifest.json").read_text(encoding="utf-8"))
        assert manifest["command"] == "experiment axioms"
        assert manifest["seed"] == 3
        assert manifest["outputs"] == [str(out)]

    def test_diameter_rows(self, capsys):
        assert main(["experiment", "diameter", "--n", "2,3", "--p", "0.5", "--pairs", "2",
                     "--seed", "0", "--budget", "100", "--restarts", "1",
                     "--envelope-samples", "100"]) == 0
        rows = read_csv(capsys.readouterr().out)
        assert len(rows) == 4
        assert all(float(row["distance_upper"]) >= 1.0 for row in rows)
        assert all(row["envelope_q"] == "" for row in rows)

    def test_envelope_on_body(self, body_file, capsys):
        assert main(["experiment", "envelope", "--body", str(body_file), "--q", "1",
                     "--samples", "500", "--seed", "2"]) == 0
        row = read_csv(capsys.readouterr().out)[0]
        assert float(row["bound"]) == pytest.approx(2.0)
        assert row["lower_violations"] == "0"
        assert row["upper_violations"] == "0"

    def test_lemma7_table(self, capsys):
        assert main(["experiment", "lemma7", "--t", "0.1", "--trials", "500",
                     "--volume-samples", "5000", "--seed", "4", "--out", "json"]) == 0
        row = json.loads(capsys.readouterr().out)["rows"][0]
        assert row["empirical_probability"] == 0.0
        assert row["consistent"] is True

    def test_lemma7_singular_map(self, write_json_file, capsys):
        singular = write_json_file("singular.json", {"dim": 2, "matrix": [[1.0, 2.0], [2.0, 4.0]]})
        assert main(["experiment", "lemma7", "--t", "0.5", "--trials", "10", "--seed", "0",
                     "--map", str(singular)]) == 4
        assert last_json_line(capsys.readouterr().err)["error"] == "NumericalFailureError"

    def test_experiment_needs_seed(self, capsys):
        assert main(["experiment", "volume", "--samples", "10"]) == 2
        assert last_json_line(capsys.readouterr().err)["details"]["error_code"] == "SEED_REQUIRED"

    def test_invalid_exponent(self, capsys):
        assert main(["experiment", "diameter", "--p", "1.5", "--seed", "0"]) == 2
        assert last_json_line(capsys.readouterr().err)["error"] == "ExponentValidationError"

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["experiment", "nothing"])
        assert exc_info.value.code == 2

    def test_runs_are_monitored(self, body_file):
        main(["gauge", str(body_file), "1,0"])
        main(["gauge", str(body_file), "1,0,0"])
        history = get_performance_monitor().get_history()
        assert [h["exit_code"] for h in history] == [0, 2]
        assert history[0]["command"] == "gauge"


class TestDiameterBaseline:
    """The seed-0 diameter study against its recorded medians"""

    def setup_method(self):
        self.baseline = json.loads(BASELINE_FILE.read_text(encoding="utf-8"))

    def _run(self, capsys):
        assert main(self.baseline["command"].split()) == 0
        return capsys.readouterr().out

    def test_acceptance_diameter_matches_recorded_baseline(self, capsys):
        first = self._run(capsys)
        assert self._run(capsys) == first

        rows = read_csv(first)
        by_n = {}
        for row in rows:
            n = int(row["n"])
            assert float(row["p"]) == self.baseline["p"]
            assert 1.0 - 1e-9 <= float(row["distance_upper"]) <= n ** 3 * (1.0 + 1e-9)
            by_n.setdefault(n, []).append(float(row["distance_upper"]))

        assert sorted(by_n) == [2, 3, 4]
        assert all(len(values) == self.baseline["pairs"] for values in by_n.values())
        medians = [float(np.median(by_n[n])) for n in sorted(by_n)]
        assert medians == sorted(medians)
        for n, median in zip(sorted(by_n), medians):
            assert median == pytest.approx(self.baseline["medians"][str(n)],
                                           rel=self.baseline["median_rel_tol"])
