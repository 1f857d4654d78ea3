import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from app.main import main
from app.models.dataset import validate_dataset
from app.schemas.analysis import AnalysisReport, OracleResult
from app.schemas.dataset import GroundTruth
from app.schemas.trace import Algorithm, SelectionTrace
from app.services.storage import read_model, write_dataset

GOLDEN = Path(__file__).parent / "golden"


def _lines(capsys):
    return capsys.readouterr().out.splitlines()


def _value(lines, prefix):
    (line,) = [line for line in lines if line.startswith(prefix + " ")]
    return line.split(" ", 1)[1]


@pytest.fixture
def appendix_csv(tmp_path, capsys):
    path = tmp_path / "appendix.csv"
    assert main(["simulate", "--model", "appendix-a", "--z", "0.1", "--out", str(path)]) == 0
    capsys.readouterr()
    return path


@pytest.fixture
def logistic_csv(tmp_path, make_logistic_instance):
    path = tmp_path / "logistic.csv"
    write_dataset(make_logistic_instance(np.random.default_rng(40), n=60, p=5), path)
    return path


class TestExitCodes:

    def test_no_arguments(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self):
        assert main(["select", "--bogus"]) == 2

    def test_missing_file(self, tmp_path):
        argv = ["oracle", "--k", "1", "--data", str(tmp_path / "nope.csv"), "--objective", "ls"]
        assert main(argv) == 2

    def test_labels_outside_zero_one(self, tmp_path):
        path = tmp_path / "labels.csv"
        X = np.random.default_rng(42).standard_normal((5, 2))
        write_dataset(validate_dataset(X, np.array([0.0, 1.0, 2.0, 1.0, 0.0])), path)
        assert main(["select", "--algo", "fs", "--k", "1", "--data", str(path), "--objective", "logistic"]) == 2

    def test_fractional_labels(self, tmp_path):
        path = tmp_path / "labels.csv"
        X = np.random.default_rng(43).standard_normal((4, 2))
        write_dataset(validate_dataset(X, np.array([0.0, 0.5, 1.0, 1.0])), path)
        assert main(["oracle", "--k", "1", "--data", str(path), "--objective", "logistic"]) == 2

    def test_separable_labels(self, tmp_path):
        path = tmp_path / "separable.csv"
        x = np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0])
        write_dataset(validate_dataset(x.reshape(-1, 1), (x > 0).astype(float)), path)
        assert main(["select", "--algo", "fs", "--k", "1", "--data", str(path), "--objective", "logistic"]) == 4

    def test_guard(self, tmp_path):
        path = tmp_path / "wide.csv"
        write_dataset(validate_dataset(np.random.default_rng(41).standard_normal((5, 40)), np.ones(5)), path)
        assert main(["oracle", "--k", "10", "--data", str(path), "--objective", "ls"]) == 3

    def test_solver_failure(self, logistic_csv):
        argv = ["select", "--algo", "fs", "--k", "2", "--data", str(logistic_csv), "--objective", "logistic",
                "--max-iters", "1", "--grad-tol", "1e-14"]
        assert main(argv) == 4


class TestAppendixInstance:

    def test_oracle(self, appendix_csv, capsys):
        assert main(["oracle", "--k", "2", "--data", str(appendix_csv), "--objective", "ls"]) == 0
        lines = _lines(capsys)
        assert _value(lines, "support") == "{0, 1}"
        assert _value(lines, "R^2") == "1.0"

    def test_forward_stepwise(self, appendix_csv, capsys):
        assert main(["select", "--algo", "fs", "--k", "2", "--data", str(appendix_csv), "--objective", "ls"]) == 0
        lines = _lines(capsys)
        assert _value(lines, "support") == "{2, 1}"
        assert float(_value(lines, "R^2")) == pytest.approx((0.05 - 8e-4) / (1 - 4e-4), abs=1e-9)

    def test_foba_recovers_the_exact_fit(self, appendix_csv, capsys):
        assert main(["select", "--algo", "foba", "--k", "3", "--data", str(appendix_csv), "--objective", "ls"]) == 0
        assert _value(_lines(capsys), "R^2") == "1.0"

    def test_analyze_reports_no_violations(self, appendix_csv, capsys, tmp_path):
        out = tmp_path / "report.json"
        argv = ["analyze", "--k", "2", "--data", str(appendix_csv), "--objective", "ls", "--exhaustive-gamma",
                "--out", str(out)]
        assert main(argv) == 0
        lines = _lines(capsys)
        assert lines[-1] == "violations 0"
        assert any(line.startswith("theorem4: pass") for line in lines)
        report = read_model(AnalysisReport, out)
        assert report.opt_support == [0, 1]


class TestOutputs:

    def test_trace_round_trip(self, appendix_csv, tmp_path, capsys):
        out = tmp_path / "trace.json"
        base = ["--data", str(appendix_csv), "--objective", "ls"]
        assert main(["select", "--algo", "omp", "--k", "2", *base, "--out", str(out)]) == 0
        trace = read_model(SelectionTrace, out)
        assert trace.algorithm == Algorithm.OMP
        assert trace.provenance["command"] == "select"
        assert SelectionTrace.model_validate_json(trace.model_dump_json()) == trace

        capsys.readouterr()
        assert main(["analyze", "--k", "2", *base, "--trace", str(out)]) == 0
        assert _lines(capsys)[-1] == "violations 0"

    def test_trace_objective_must_match(self, logistic_csv, tmp_path):
        out = tmp_path / "trace.json"
        base = ["--data", str(logistic_csv)]
        assert main(["select", "--algo", "fs", "--k", "1", *base, "--objective", "logistic", "--out", str(out)]) == 0
        argv = ["analyze", "--k", "1", *base, "--objective", "logistic-l2", "--eta", "0.1", "--trace", str(out)]
        assert main(argv) == 2

    def test_csv_trace(self, appendix_csv, tmp_path):
        out = tmp_path / "trace.csv"
        argv = ["select", "--algo", "foba", "--k", "3", "--data", str(appendix_csv), "--objective", "ls",
                "--out", str(out), "--format", "csv"]
        assert main(argv) == 0
        frame = pd.read_csv(out)
        assert list(frame["action"]) == ["add", "add", "add", "drop"]
        assert list(frame["chosen_index"]) == [2, 1, 0, 2]

    def test_oracle_json(self, appendix_csv, tmp_path):
        out = tmp_path / "oracle.json"
        assert main(["oracle", "--k", "2", "--data", str(appendix_csv), "--objective", "ls", "--out", str(out)]) == 0
        result = read_model(OracleResult, out)
        assert result.support == [0, 1]
        assert result.r_squared == pytest.approx(1.0, abs=1e-9)

    def test_outputs_do_not_depend_on_threads(self, logistic_csv, tmp_path, capsys):
        out = tmp_path / "trace.json"
        argv = ["select", "--algo", "fs", "--k", "3", "--data", str(logistic_csv), "--objective", "logistic",
                "--add-bias", "--out", str(out)]
        outputs = []
        for threads in ("1", "8"):
            capsys.readouterr()
            assert main([*argv, "--threads", threads]) == 0
            outputs.append((out.read_bytes(), capsys.readouterr().out))
        assert outputs[0] == outputs[1]


class TestSimulate:

    def test_truth_and_data(self, tmp_path, capsys):
        data_path, truth_path = tmp_path / "ar1.csv", tmp_path / "truth.json"
        argv = ["simulate", "--model", "ar1-logistic", "--n", "40", "--p", "12", "--k-true", "3", "--seed", "9",
                "--out", str(data_path), "--truth-out", str(truth_path)]
        assert main(argv) == 0
        frame = pd.read_csv(data_path)
        assert frame.shape == (40, 13)
        assert set(frame["y"]) <= {0.0, 1.0}
        truth = read_model(GroundTruth, truth_path)
        assert len(truth.support) == 3
        assert sum(b * b for b in truth.beta) == pytest.approx(5.0)

    def test_same_seed_same_bytes(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (first, second):
            assert main(["simulate", "--model", "spiked", "--n", "20", "--p", "6", "--k-true", "2",
                         "--out", str(path)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_no_truth_for_appendix(self, tmp_path):
        argv = ["simulate", "--model", "appendix-a", "--out", str(tmp_path / "a.csv"),
                "--truth-out", str(tmp_path / "t.json")]
        assert main(argv) == 2


class TestAnalyzePopulation:

    def test_spiked(self, capsys):
        assert main(["analyze", "--k", "4", "--population", "spiked", "--p", "50", "--a", "0.5"]) == 0
        assert "k=4 m=0.5 M=2.5" in capsys.readouterr().out

    def test_isometry_requirement(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        argv = ["analyze", "--k", "4", "--r", "2", "--population", "spiked", "--p", "50", "--a", "0.1",
                "--out", str(out)]
        assert main(argv) == 0
        assert "isometry s=4 r=2: M_s=1.3 2m_(s+r)=1.8 holds (spike threshold 0.2)" in _lines(capsys)
        report = read_model(AnalysisReport, out)
        assert report.isometry.holds
        assert [p.k for p in report.params] == [4, 6]

    def test_identity_plus_ones_fails_the_requirement(self, capsys):
        assert main(["analyze", "--k", "3", "--population", "identity_plus_ones", "--p", "10"]) == 0
        (line,) = [line for line in _lines(capsys) if line.startswith("isometry")]
        assert line.endswith("fails")

    def test_r_out_of_range(self):
        assert main(["analyze", "--k", "4", "--r", "47", "--population", "spiked", "--p", "50"]) == 2

    def test_needs_dimension(self):
        assert main(["analyze", "--k", "4", "--population", "spiked"]) == 2

    def test_needs_data(self):
        assert main(["analyze", "--k", "2"]) == 2


def test_experiment(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"n": 60, "n_test": 60, "p": 8, "k_true": 2, "runs": 2, "s_max": 3,
                                  "algorithms": ["fs", "omp"]}))
    out = tmp_path / "results.csv"
    assert main(["experiment", "--config", str(config), "--out", str(out), "--seed", "3"]) == 0
    results = pd.read_csv(out)
    summary = pd.read_csv(tmp_path / "results_summary.csv")
    assert set(results["algo"]) == {"forward_stepwise", "omp"}
    assert (summary["count"] == 2).all()
    lines = _lines(capsys)
    assert lines[0].startswith("experiment: 2 runs, s_max=3")


@pytest.mark.parametrize("golden, argv", [
    ("oracle_appendix.txt", ["oracle", "--k", "2", "--objective", "ls"]),
    ("fs_appendix.txt", ["select", "--algo", "fs", "--k", "2", "--objective", "ls"]),
    ("foba_appendix.txt", ["select", "--algo", "foba", "--k", "3", "--objective", "ls"]),
])
def test_replays_golden_output(golden, argv, appendix_csv, capsys):
    expected = (GOLDEN / golden).read_text()
    for threads in ("1", "8"):
        assert main([*argv, "--data", str(appendix_csv), "--threads", threads]) == 0
        assert capsys.readouterr().out == expected


def test_replays_golden_population_report(capsys):
    expected = (GOLDEN / "population_spiked.txt").read_text()
    for threads in ("1", "8"):
        assert main(["analyze", "--k", "4", "--population", "spiked", "--p", "50", "--a", "0.5",
                     "--threads", threads]) == 0
        assert capsys.readouterr().out == expected
