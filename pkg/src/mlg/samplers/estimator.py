"""Concentration estimator driving either the compiled kernel or the reference steps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..access import QueryStats, UniformStream, trial_generator
from ..catalog import ALGORITHMS, NUM_TYPES, RESTRICTED_TYPES, alpha_array, classify_state
from ..graph import TwoLayerGraph
from . import kernel as K
from .states import B, R, state_from_row
from .steps import STEP_FUNCTIONS, DeadEndError, initial_state, make_facade, stationary_weight

ALPHA_MODES = ("presence", "table")


@dataclass
class ConcentrationEstimate:
    algo: str
    steps: int
    seed: int
    trial: int
    C_hat: np.ndarray  # length 17, slot 0 unused
    visits: np.ndarray  # length 17, slot 0 counts degenerate states
    query_stats: QueryStats = field(default_factory=QueryStats)
    snapshots: dict[int, np.ndarray] = field(default_factory=dict)  # checkpoint -> C_hat copy
    M: float | None = None

    @property
    def d_hat(self) -> np.ndarray:
        """Concentrations over types 1..14 (index 0 -> type 1)."""
        return normalise(self.C_hat)

    @property
    def degenerate_state_count(self) -> int:
        return int(self.visits[0])

    def d_hat_all(self) -> np.ndarray:
        c = self.C_hat[1 : NUM_TYPES + 1]
        s = c.sum()
        return c / s if s > 0 else np.zeros(NUM_TYPES)

    def counts(self) -> np.ndarray | None:
        """Estimated |C_i| for types 1..16 when a normaliser M was supplied."""
        if self.M is None:
            return None
        return self.M * self.C_hat[1:] / self.steps

    def to_json(self) -> dict:
        out = {
            "algo": self.algo,
            "steps": self.steps,
            "seed": self.seed,
            "d_hat": self.d_hat.tolist(),
            "C_hat_weights": self.C_hat[1 : RESTRICTED_TYPES + 1].tolist(),
            "degenerate_state_count": self.degenerate_state_count,
            "query_stats": self.query_stats.to_dict(),
        }
        if self.algo == "rwnr":
            out["d_hat_1_16"] = self.d_hat_all().tolist()
        if self.M is not None:
            out["M"] = self.M
            out["count_estimates"] = self.counts().tolist()
        return out


def normalise(C: np.ndarray) -> np.ndarray:
    c = np.asarray(C, dtype=float)[1 : RESTRICTED_TYPES + 1]
    s = c.sum()
    return c / s if s > 0 else np.zeros(RESTRICTED_TYPES)


class WalkError(RuntimeError):
    def __init__(self, message: str, algo: str, seed: int, trial: int):
        super().__init__(f"{algo} walk aborted (seed={seed}, trial={trial}): {message}")
        self.algo = algo
        self.seed = seed
        self.trial = trial


def _alpha_setup(algo: str, alpha_mode: str):
    if alpha_mode not in ALPHA_MODES:
        raise ValueError(f"alpha_mode must be one of {ALPHA_MODES}")
    alpha = alpha_array(algo).astype(np.float64)
    max_type = NUM_TYPES if algo == "rwnr" else RESTRICTED_TYPES
    alpha[max_type + 1 :] = 0.0
    base = alpha_array("rwnbn").astype(np.float64)
    presence = alpha_mode == "presence" and algo in ("rwomrn", "rwmix")
    return alpha, base, presence, max_type


def _checkpoint_list(steps: int, checkpoints) -> list[int]:
    cps = sorted({int(c) for c in (checkpoints or [])} | {steps})
    if cps[0] < 1 or cps[-1] > steps:
        raise ValueError("checkpoints must lie in [1, steps]")
    return cps


def run_estimator(
    algo: str,
    g: TwoLayerGraph,
    steps: int,
    seed: int,
    trial: int = 0,
    alpha_mode: str = "presence",
    checkpoints=None,
    burn_in: int = 0,
    M: float | None = None,
    chunk: int = 1 << 15,
) -> ConcentrationEstimate:
    """Run one walk with the compiled kernel and accumulate estimator weights."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    alpha, base, presence, max_type = _alpha_setup(algo, alpha_mode)
    arrays = K.graph_arrays(g)
    rng = trial_generator(seed, trial)
    stream = UniformStream(rng, chunk=64)
    try:
        s0 = initial_state(g, algo, stream)
    except DeadEndError as exc:
        raise WalkError(str(exc), algo, seed, trial) from None
    # carry over any draws the initial-state stream buffered but did not consume
    buf = np.concatenate([stream.buf[stream.pos :], rng.random(chunk)])
    pos = 0
    st = np.array(s0.as_row(), dtype=np.int64)
    C = np.zeros(NUM_TYPES + 1)
    visits = np.zeros(NUM_TYPES + 1, dtype=np.int64)
    no_trace = np.zeros((0, 5), dtype=np.int64)
    code = K.ALGO_CODES[algo]
    est = ConcentrationEstimate(algo, steps, seed, trial, C, visits, M=M)

    def advance(n: int, accumulate: bool):
        nonlocal buf, pos
        while n > 0:
            done, pos, status = K.walk_kernel(
                code, st, buf, pos, n, *arrays[:5],
                K.TYPE_TABLE_I64, alpha, base, presence, max_type,
                accumulate, C, visits, no_trace, 0,
            )
            if status != K.OK:
                raise WalkError(f"dead end at state {st.tolist()}", algo, seed, trial)
            n -= done
            if n > 0:
                buf = np.concatenate([buf[pos:], rng.random(chunk)])
                pos = 0

    if burn_in:
        advance(burn_in, False)
    prev = 0
    for cp in _checkpoint_list(steps, checkpoints):
        advance(cp - prev, True)
        est.snapshots[cp] = C.copy()
        prev = cp
    return est


def kernel_trace(algo: str, g: TwoLayerGraph, steps: int, seed: int, trial: int = 0, chunk: int = 64) -> np.ndarray:
    """States visited by the compiled kernel (row per step), initial state first."""
    alpha, base, presence, max_type = _alpha_setup(algo, "table")
    arrays = K.graph_arrays(g)
    rng = trial_generator(seed, trial)
    stream = UniformStream(rng, chunk=chunk)
    s0 = initial_state(g, algo, stream)
    buf = np.concatenate([stream.buf[stream.pos :], rng.random(chunk)])
    pos = 0
    st = np.array(s0.as_row(), dtype=np.int64)
    trace = np.zeros((steps + 1, 5), dtype=np.int64)
    trace[0] = st
    C = np.zeros(NUM_TYPES + 1)
    visits = np.zeros(NUM_TYPES + 1, dtype=np.int64)
    off = 1
    while off <= steps:
        done, pos, status = K.walk_kernel(
            K.ALGO_CODES[algo], st, buf, pos, steps + 1 - off, *arrays,
            K.TYPE_TABLE_I64, alpha, base, presence, max_type,
            False, C, visits, trace, off,
        )
        if status != K.OK:
            raise WalkError("dead end", algo, seed, trial)
        off += done
        buf = np.concatenate([buf[pos:], rng.random(chunk)])
        pos = 0
    return trace


def reference_walk(
    algo: str,
    g: TwoLayerGraph,
    steps: int,
    seed: int,
    trial: int = 0,
    facade=None,
    alpha_mode: str = "presence",
    record: bool = False,
):
    """Pure-Python walk through the access facade; returns (estimate, trace or None)."""
    alpha, base, presence, max_type = _alpha_setup(algo, alpha_mode)
    rng = UniformStream(trial_generator(seed, trial))
    facade = facade if facade is not None else make_facade(g, algo)
    state = initial_state(g, algo, rng, facade)
    step = STEP_FUNCTIONS[algo]
    C = np.zeros(NUM_TYPES + 1)
    visits = np.zeros(NUM_TYPES + 1, dtype=np.int64)
    trace = [state.as_row()] if record else None
    walkable = g.walkable()
    for _ in range(steps):
        try:
            state = step(state, facade, rng)
        except DeadEndError as exc:
            raise WalkError(str(exc), algo, seed, trial) from None
        if record:
            trace.append(state.as_row())
        t, w = _contribution(g, state, algo, alpha, base, presence, max_type, walkable)
        visits[t] += 1
        C[t] += w
    est = ConcentrationEstimate(algo, steps, seed, trial, C, visits, query_stats=facade.stats)
    return est, (np.array(trace, dtype=np.int64) if record else None)


def _contribution(g, state, algo, alpha, base, presence, max_type, walkable) -> tuple[int, float]:
    t = classify_state(g, state)
    if t == 0 or t > max_type:
        return t, 0.0
    a_t = alpha[t]
    if presence:
        a_t = base[t] + _presence_extra(g, state_identities_ordered(state), walkable)
    if a_t <= 0:
        return t, 0.0
    return t, 1.0 / (a_t * float(stationary_weight(g, state, algo)))


def state_contribution(g: TwoLayerGraph, state, algo: str, alpha_mode: str = "presence") -> tuple[int, float]:
    """Graphlet type of ``state`` and the weight it adds to that type's accumulator."""
    alpha, base, presence, max_type = _alpha_setup(algo, alpha_mode)
    return _contribution(g, state, algo, alpha, base, presence, max_type, g.walkable())


def state_identities_ordered(state) -> tuple[int, int, int]:
    return state.nodes() if hasattr(state, "e1") else state.nodes


def _presence_extra(g: TwoLayerGraph, nodes, walkable) -> int:
    """Red-red states headed at a walkable identity of the triple."""
    import itertools

    extra = 0
    for h, y, z in itertools.permutations(nodes):
        if walkable[h] and g.has_red_edge(h, y) and g.has_red_edge(y, z):
            extra += 1
    return extra


__all__ = [
    "ConcentrationEstimate",
    "WalkError",
    "run_estimator",
    "reference_walk",
    "kernel_trace",
    "normalise",
    "state_contribution",
    "state_from_row",
    "B",
    "R",
]
