"""Exact ground truth and explicit-chain checks."""

from .chain import ExplicitChain, build_explicit_chain, transitions
from .exact import GroundTruth, bound_diagnostics, compute_M, count_exact, naive_count

__all__ = [
    "ExplicitChain",
    "GroundTruth",
    "bound_diagnostics",
    "build_explicit_chain",
    "compute_M",
    "count_exact",
    "naive_count",
    "transitions",
]
