import csv
import json
import math

import numpy as np
import pytest
from conftest import random_two_layer

from mlg.experiments import ExperimentError, ExperimentPlan, MetricSeries, emit_report, run_experiment
from mlg.experiments.report import series_from_json, series_to_json
from mlg.experiments.runner import relative_errors
from mlg.oracle import count_exact


@pytest.fixture(scope="module")
def graph():
    return random_two_layer(np.random.default_rng(7), 25, 0.2, 0.12)


@pytest.fixture(scope="module")
def truth(graph):
    return count_exact(graph)


def test_perfect_estimator_has_zero_error(truth):
    plan = ExperimentPlan(algorithms=("rwnbn",), trials=5, steps=100, checkpoint_stride=50)
    d = truth.concentrations()

    def exact(algo, trial):
        return np.tile(d, (2, 1)), {"blue": 1}

    s = run_experiment(plan, truth, trial_fn=exact)
    ok = d > 0
    assert np.all(s.mre["rwnbn"][:, ok] == 0)
    assert np.all(s.nrmse["rwnbn"][:, ok] == 0)
    assert np.all(np.isnan(s.mre["rwnbn"][:, ~ok]))
    assert s.query_stats["rwnbn"] == {"blue": 5}


def test_relative_errors_by_hand():
    est = np.array([[1.0, 2.0], [3.0, 2.0]])
    mre, nrmse = relative_errors(est, np.array([2.0, 0.0]))
    assert mre[0] == pytest.approx(0.5)
    assert nrmse[0] == pytest.approx(0.5)
    assert math.isnan(mre[1])


def test_nrmse_dominates_bias(graph, truth):
    plan = ExperimentPlan(algorithms=("rwnbn", "rwmix"), trials=20, steps=4000, checkpoint_stride=2000)
    s = run_experiment(plan, truth, g=graph)
    ref = truth.concentrations()
    ok = ref > 0
    for a in plan.algorithms:
        bias = np.abs(s.estimates[a].mean(axis=0)[:, ok] - ref[ok]) / ref[ok]
        assert np.all(s.nrmse[a][:, ok] + 1e-12 >= bias)
        assert np.all(s.nrmse[a][:, ok] + 1e-12 >= s.mre[a][:, ok])


def test_results_reproducible_across_thread_counts(graph, truth):
    base = dict(algorithms=("rwebe",), trials=8, steps=3000, checkpoint_stride=1000, base_seed=3)
    a = run_experiment(ExperimentPlan(**base, threads=1), truth, g=graph)
    b = run_experiment(ExperimentPlan(**base, threads=3), truth, g=graph)
    assert np.array_equal(a.estimates["rwebe"], b.estimates["rwebe"])
    assert a.checkpoints == [1000, 2000, 3000]


def test_standard_error_shrinks_with_trials(graph, truth):
    plan = ExperimentPlan(algorithms=("rwnbn",), trials=400, steps=2000, checkpoint_stride=2000)
    s = run_experiment(plan, truth, g=graph)
    est = s.estimates["rwnbn"][:, -1, 0]
    se = []
    for T in (25, 100, 400):
        se.append(est[:T].std(ddof=1) / math.sqrt(T))
    assert se[1] / se[0] == pytest.approx(0.5, rel=0.4)
    assert se[2] / se[1] == pytest.approx(0.5, rel=0.4)


def test_count_target(graph, truth):
    plan = ExperimentPlan(algorithms=("rwnbn",), trials=30, steps=20000, checkpoint_stride=20000, target="counts")
    s = run_experiment(plan, truth, g=graph)
    ref = truth.counts[:14].astype(float)
    big = ref >= 0.05 * ref.sum()
    mean = s.estimates["rwnbn"][:, -1].mean(axis=0)
    assert np.all(np.abs(mean[big] / ref[big] - 1) < 0.1)


def test_plan_validation(truth):
    with pytest.raises(ValueError):
        run_experiment(ExperimentPlan(trials=0), truth, trial_fn=lambda a, t: None)
    with pytest.raises(ValueError):
        run_experiment(ExperimentPlan(algorithms=("nope",)), truth, trial_fn=lambda a, t: None)
    with pytest.raises(ExperimentError):
        run_experiment(ExperimentPlan(), None, trial_fn=lambda a, t: None)
    with pytest.raises(ExperimentError):
        run_experiment(ExperimentPlan(trials=1, steps=10), truth)
    plan = ExperimentPlan(steps=5000, checkpoint_stride=2000)
    assert plan.checkpoint_list() == [2000, 4000, 5000]


def test_csv_and_report_files(tmp_path, graph, truth):
    plan = ExperimentPlan(algorithms=("rwnbn", "rwomrn"), trials=4, steps=2000, checkpoint_stride=1000)
    s = run_experiment(plan, truth, g=graph)
    files = emit_report(s, tmp_path)
    names = sorted(p.rsplit("/", 1)[-1] for p in files)
    assert "results.csv" in names and "results.json" in names
    for a in plan.algorithms:
        for kind in ("mre", "nrmse", "scatter"):
            svg = (tmp_path / f"{a}_{kind}.svg").read_text()
            assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    with open(tmp_path / "results.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["algo", "type", "checkpoint", "metric", "value"]
    assert len(rows) - 1 == len(plan.algorithms) * 14 * len(s.checkpoints) * 2
    back = series_from_json(json.loads((tmp_path / "results.json").read_text()))
    assert np.allclose(back.mre["rwnbn"], s.mre["rwnbn"], equal_nan=True)


def test_empty_series_rejected(tmp_path):
    empty = MetricSeries([], [], np.zeros(14), "concentrations")
    with pytest.raises(ValueError):
        emit_report(empty, tmp_path)


def test_json_roundtrip_nan_as_null():
    s = MetricSeries(["rwnbn"], [10], np.array([0.5, 0.0] + [0.0] * 12), "concentrations")
    s.mre["rwnbn"] = np.array([[0.1] + [np.nan] * 13])
    s.nrmse["rwnbn"] = np.array([[0.2] + [np.nan] * 13])
    data = json.loads(json.dumps(series_to_json(s)))
    assert data["metrics"]["mre"]["rwnbn"][0][1] is None
    assert series_from_json(data).nrmse["rwnbn"][0, 0] == 0.2

