"""Multi-trial experiment runner: per-checkpoint estimates, MRE and NRMSE."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..catalog import ALGORITHMS, RESTRICTED_TYPES
from ..graph import TwoLayerGraph
from ..oracle.exact import GroundTruth, compute_M
from ..samplers.estimator import WalkError, normalise, run_estimator

log = logging.getLogger(__name__)


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentPlan:
    algorithms: tuple[str, ...] = ALGORITHMS
    trials: int = 1000
    steps: int = 20000
    checkpoint_stride: int = 2000
    checkpoints: tuple[int, ...] | None = None
    base_seed: int = 0
    target: str = "concentrations"  # or "counts"
    alpha_mode: str = "presence"
    burn_in: int = 0
    threads: int = 1
    graph_path: str | None = None

    def checkpoint_list(self) -> list[int]:
        if self.checkpoints:
            cps = sorted(set(int(c) for c in self.checkpoints))
        else:
            stride = max(1, int(self.checkpoint_stride))
            cps = list(range(stride, self.steps + 1, stride))
        if not cps or cps[-1] != self.steps:
            cps.append(self.steps)
        return cps

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms: {bad}")
        if self.target not in ("concentrations", "counts"):
            raise ValueError("target must be 'concentrations' or 'counts'")
        cps = self.checkpoint_list()
        if cps[0] < 1 or cps[-1] > self.steps:
            raise ValueError("checkpoints must lie in [1, steps]")


@dataclass
class MetricSeries:
    algorithms: list[str]
    checkpoints: list[int]
    truth: np.ndarray  # reference values per type 1..14
    target: str
    estimates: dict[str, np.ndarray] = field(default_factory=dict)  # (T, n_cp, 14)
    mre: dict[str, np.ndarray] = field(default_factory=dict)  # (n_cp, 14)
    nrmse: dict[str, np.ndarray] = field(default_factory=dict)
    query_stats: dict[str, dict] = field(default_factory=dict)

    def final(self, metric: str, algo: str) -> np.ndarray:
        return getattr(self, metric)[algo][-1]


# Estimator hook: (algo, trial) -> array (n_cp, 14) of estimates, plus query stats dict.
TrialFn = Callable[[str, int], tuple[np.ndarray, dict]]


def relative_errors(est: np.ndarray, ref: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """MRE and NRMSE over the leading (trial) axis; NaN where the reference is 0."""
    ref = np.asarray(ref, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = est - ref
        mre = np.mean(np.abs(diff), axis=0) / ref
        nrmse = np.sqrt(np.mean(diff**2, axis=0)) / ref
    mre = np.where(ref > 0, mre, np.nan)
    nrmse = np.where(ref > 0, nrmse, np.nan)
    return mre, nrmse


def _default_trial_fn(plan: ExperimentPlan, g: TwoLayerGraph, cps: list[int]) -> TrialFn:
    Ms = {a: compute_M(g, a) for a in plan.algorithms} if plan.target == "counts" else {}

    def fn(algo: str, trial: int):
        est = run_estimator(
            algo, g, plan.steps, plan.base_seed, trial=trial,
            alpha_mode=plan.alpha_mode, checkpoints=cps, burn_in=plan.burn_in,
        )
        rows = []
        for cp in cps:
            C = est.snapshots[cp]
            if plan.target == "counts":
                rows.append(Ms[algo] * C[1 : RESTRICTED_TYPES + 1] / cp)
            else:
                rows.append(normalise(C))
        return np.array(rows), est.query_stats.to_dict()

    return fn


def run_experiment(
    plan: ExperimentPlan,
    truth: GroundTruth | None,
    g: TwoLayerGraph | None = None,
    trial_fn: TrialFn | None = None,
) -> MetricSeries:
    if truth is None:
        raise ExperimentError("ground truth is required")
    plan.validate()
    cps = plan.checkpoint_list()
    if trial_fn is None:
        if g is None:
            raise ExperimentError("a graph is required unless a trial function is supplied")
        trial_fn = _default_trial_fn(plan, g, cps)
    if plan.target == "counts":
        ref = truth.counts[:RESTRICTED_TYPES].astype(float)
    else:
        ref = truth.concentrations("restricted")
    series = MetricSeries(list(plan.algorithms), cps, ref, plan.target)
    for algo in plan.algorithms:

        def one(trial, algo=algo):
            try:
                return trial_fn(algo, trial)
            except WalkError as exc:
                raise ExperimentError(f"trial {trial} (base seed {plan.base_seed}) failed: {exc}") from exc

        if plan.threads > 1:
            with ThreadPoolExecutor(plan.threads) as ex:
                results = list(ex.map(one, range(plan.trials)))
        else:
            results = [one(t) for t in range(plan.trials)]
        est = np.stack([r[0] for r in results])  # trial-index order
        series.estimates[algo] = est
        series.mre[algo], series.nrmse[algo] = relative_errors(est, ref)
        stats: dict = {}
        for _, qs in results:
            for k, v in qs.items():
                stats[k] = stats.get(k, 0) + v
        series.query_stats[algo] = stats
        log.info("%s: %d trials done", algo, plan.trials)
    return series
