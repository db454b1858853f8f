"""Restricted and unrestricted random walks with the concentration estimator."""

from .estimator import (
    ConcentrationEstimate,
    WalkError,
    kernel_trace,
    reference_walk,
    run_estimator,
    state_contribution,
)
from .states import EdgePair, NodeTriple, state_from_row
from .steps import (
    DeadEndError,
    initial_state,
    stationary_weight,
    step_rwebe,
    step_rwmix,
    step_rwnbn,
    step_rwnr,
    step_rwomrn,
)

__all__ = [
    "ConcentrationEstimate",
    "WalkError",
    "DeadEndError",
    "EdgePair",
    "NodeTriple",
    "initial_state",
    "kernel_trace",
    "reference_walk",
    "run_estimator",
    "state_contribution",
    "state_from_row",
    "stationary_weight",
    "step_rwebe",
    "step_rwmix",
    "step_rwnbn",
    "step_rwnr",
    "step_rwomrn",
]
