import csv
import io
import json

import pytest

from fiolab.harness import (EXPERIMENTS, SEVEN_EXPERIMENTS, ExperimentReport,
                            loss_threshold, run_experiment, weight_threshold)
from fiolab.util import DomainError


def test_thresholds_at_known_exponents():
    assert loss_threshold(2.0, 2) == 0.0
    assert loss_threshold(1.0, 2) == -0.5
    assert loss_threshold(1.0, 3) == -1.0
    assert weight_threshold(1.0, 2) == -1.0
    assert weight_threshold(4.0, 2) == -0.5


def test_registry_contains_the_seven_core_experiments():
    assert len(SEVEN_EXPERIMENTS) == 7
    for name in SEVEN_EXPERIMENTS:
        assert name in EXPERIMENTS
    assert len(EXPERIMENTS) >= 13


def test_unknown_experiment_rejected():
    with pytest.raises(DomainError):
        run_experiment("no_such_experiment", {})


def test_report_serialization_roundtrip(tmp_path):
    rep = ExperimentReport(
        experiment="demo", params={"n": 2, "grid.extent": 4.0},
        samples=[[1.0, 2.0], [2.0, 0.5]], fit={"slope": -1.0},
        verdict="pass", diagnostics={"note": 3})
    obj = json.loads(rep.to_json())
    assert obj["verdict"] == "pass"
    assert obj["fit"]["slope"] == -1.0
    assert obj["samples"] == [[1.0, 2.0], [2.0, 0.5]]

    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["x", "y"]
    assert rows[1] == ["1.0", "2.0"] and len(rows) == 3

    jpath, cpath = rep.write(tmp_path)
    assert json.load(open(jpath))["experiment"] == "demo"
    assert open(cpath).read() == rep.to_csv()


def test_report_echo_excludes_worker_count():
    rep = run_experiment("partition_check", {"workers": 4, "n": 2})
    assert "workers" not in rep.params
    assert rep.params.get("n") == 2
    assert rep.verdict == "pass"


def test_run_experiment_returns_fit_for_sweeps():
    config = {"n": 2, "exceptional.j_list": [2, 3, 4, 5],
              "grid.points": 192, "grid.extent": 12.0}
    rep = run_experiment("nq_measure", config)
    assert rep.fit is not None and "slope" in rep.fit
    assert rep.verdict in ("pass", "fail")
