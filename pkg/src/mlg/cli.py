"""Command-line entry point: ``mlg <subcommand> ...``."""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .catalog import ALGORITHMS, GRAPHLETS, catalog_rows
from .graph import GraphFormatError, load_graph, save_graph

log = logging.getLogger("mlg")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


def _algo_list(text: str) -> list[str]:
    algos = [a.strip().lower() for a in text.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {','.join(ALGORITHMS)}")
    return algos


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base random seed (default 0)")
    g.add_argument(
        "--threads", type=_positive, default=argparse.SUPPRESS,
        help="worker threads (default: $MLG_THREADS or CPU count)",
    )
    g.add_argument(
        "--log-level", default=argparse.SUPPRESS,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="logging level (default WARNING)",
    )
    g.add_argument("--config", default=argparse.SUPPRESS, metavar="FILE", help="INI-style key=value config file")
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="mlg",
        description="Graphlet concentration estimation on two-layer multiplex graphs.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"mlg {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("generate", parents=[common], help="generate a synthetic two-layer graph")
    p.add_argument("--blue", default="er:n=1000,m=9500", help="blue model: er:n=,m=|p= ; sw:n=,k=,p= ; ba:n=,m=")
    p.add_argument("--red", default="er:ratio=0.4,rho=0.3", help="red model: er:ratio=,rho=|m=|p= ; sw:k=,p= ; ba:m=")
    p.add_argument("--coupling", default="one-to-one", choices=["one-to-one", "half-overlap", "blue-double", "1", "2", "3"])
    p.add_argument("-o", "--output", required=True, help="output .mlx path")

    p = sub.add_parser("ingest", parents=[common], help="real blue edge list plus a synthetic red layer")
    p.add_argument("edgelist", help="whitespace-separated blue edge list")
    p.add_argument("--red", default="er:ratio=0.4,rho=0.3", help="red model (as for generate)")
    p.add_argument("--coupling", default="one-to-one", choices=["one-to-one", "half-overlap", "blue-double", "1", "2", "3"])
    p.add_argument("-o", "--output", required=True, help="output .mlx path")

    p = sub.add_parser("exact", parents=[common], help="exact graphlet counts and concentrations")
    p.add_argument("graph", help="input .mlx graph")
    p.add_argument("-o", "--output", help="write ground-truth JSON here")

    p = sub.add_parser("sample", parents=[common], help="run one random walk estimator")
    p.add_argument("graph", help="input .mlx graph")
    p.add_argument("--algo", default="rwnbn", choices=list(ALGORITHMS))
    p.add_argument("--steps", type=_positive, default=20000, help="walk length n (default 20000)")
    p.add_argument("--trial", type=_non_negative, default=0, help="trial index of the random stream")
    p.add_argument("--burn-in", type=_non_negative, default=0, help="unweighted steps before estimation")
    p.add_argument("--alpha-mode", default="presence", choices=["presence", "table"], help="state coefficient mode")
    p.add_argument("--counts", action="store_true", help="also emit count estimates using the exact normaliser M")
    p.add_argument("-o", "--output", help="write result JSON here")

    p = sub.add_parser("experiment", parents=[common], help="multi-trial MRE/NRMSE experiment")
    p.add_argument("graph", help="input .mlx graph")
    p.add_argument("--algos", type=_algo_list, default=list(ALGORITHMS), help="comma-separated algorithms")
    p.add_argument("--trials", type=_positive, default=1000, help="independent trials T (default 1000)")
    p.add_argument("--steps", type=_positive, default=20000, help="walk length n (default 20000)")
    p.add_argument("--stride", type=_positive, default=2000, help="checkpoint stride (default 2000)")
    p.add_argument("--target", default="concentrations", choices=["concentrations", "counts"])
    p.add_argument("--alpha-mode", default="presence", choices=["presence", "table"])
    p.add_argument("--burn-in", type=_non_negative, default=0)
    p.add_argument("--truth", help="ground-truth JSON from 'exact' (computed if omitted)")
    p.add_argument("-o", "--output", default="results", help="output directory (default ./results)")

    p = sub.add_parser("report", parents=[common], help="re-render CSV and SVG charts from results.json")
    p.add_argument("results", help="results.json written by 'experiment'")
    p.add_argument("-o", "--output", default=None, help="output directory (default: alongside results)")

    p = sub.add_parser("catalog", parents=[common], help="print the graphlet catalog and coefficients")
    p.add_argument("--model", default="all", choices=["all", *ALGORITHMS])

    p = sub.add_parser("diagnose", parents=[common], help="bound diagnostics and explicit-chain checks")
    p.add_argument("graph", help="input .mlx graph")
    p.add_argument("--algo", default="rwnbn", choices=list(ALGORITHMS))
    p.add_argument("--chain-cap", type=_positive, default=5000, help="max explicit chain states (default 5000)")
    return parser


# -- config resolution --------------------------------------------------------

GLOBAL_DEFAULTS = {"seed": 0, "threads": None, "log_level": "WARNING", "json": False}


def _read_config(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"bad config file {path}: {exc}") from None
    return cp


def _apply_config(parser: argparse.ArgumentParser, cp: configparser.ConfigParser) -> dict:
    """Push config values in as parser defaults; returns the [global] section."""
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in subparsers.choices.items():
        if not cp.has_section(name):
            continue
        actions = {a.dest: a for a in sp._actions}
        values = {}
        for key, raw in cp.items(name):
            dest = key.replace("-", "_")
            act = actions.get(dest)
            if act is None or dest in GLOBAL_DEFAULTS:
                raise UsageError(f"config section [{name}] has unknown key {key!r}")
            if isinstance(act, argparse._StoreTrueAction):
                values[dest] = cp.getboolean(name, key)
            else:
                try:
                    values[dest] = act.type(raw) if act.type else raw
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config [{name}] {key}: {exc}") from None
                if act.choices and values[dest] not in act.choices:
                    raise UsageError(f"config [{name}] {key}: {raw!r} not in {list(act.choices)}")
        sp.set_defaults(**values)
    glob = {}
    if cp.has_section("global"):
        for key, raw in cp.items("global"):
            dest = key.replace("-", "_")
            if dest not in GLOBAL_DEFAULTS:
                raise UsageError(f"config section [global] has unknown key {key!r}")
            if dest == "json":
                glob[dest] = cp.getboolean("global", key)
            elif dest in ("seed", "threads"):
                glob[dest] = int(raw)
            else:
                glob[dest] = raw.upper()
    return glob


def resolve(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    glob = {}
    if known.config:
        glob = _apply_config(parser, _read_config(known.config))
    ns = parser.parse_args(argv)
    for key, default in GLOBAL_DEFAULTS.items():
        if not hasattr(ns, key):
            setattr(ns, key, glob.get(key, default))
    if ns.threads is None:
        env = os.environ.get("MLG_THREADS")
        if env:
            try:
                ns.threads = _positive(env)
            except (ValueError, argparse.ArgumentTypeError):
                raise UsageError(f"MLG_THREADS={env!r} is not a positive integer") from None
        else:
            ns.threads = os.cpu_count() or 1
    if not hasattr(ns, "config"):
        ns.config = None
    return ns


# -- subcommands --------------------------------------------------------------


def _emit(ns, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=1) if ns.json else text)


def _coupling(text: str) -> int:
    from .generators import COUPLINGS

    return COUPLINGS[text]


def cmd_generate(ns):
    from .generators import GeneratorError, GeneratorSpec, ModelSpec, generate

    try:
        spec = GeneratorSpec(ModelSpec.parse(ns.blue), ModelSpec.parse(ns.red), _coupling(ns.coupling), ns.seed)
        g = generate(spec)
    except GeneratorError as exc:
        raise UsageError(str(exc)) from None
    save_graph(g, ns.output)
    info = _graph_info(g)
    _emit(ns, {"output": ns.output, **info}, f"wrote {ns.output}: {g!r}")


def cmd_ingest(ns):
    from .generators import GeneratorError, ModelSpec, ingest_external

    try:
        red = ModelSpec.parse(ns.red)
    except GeneratorError as exc:
        raise UsageError(str(exc)) from None
    g, info = ingest_external(ns.edgelist, red, _coupling(ns.coupling), ns.seed)
    save_graph(g, ns.output)
    _emit(ns, {"output": ns.output, **info}, f"wrote {ns.output}: {g!r} (input {info['input_nodes']} nodes)")


def _graph_info(g) -> dict:
    return {
        "identities": g.num_identities,
        "blue_nodes": int(g.in_blue.sum()),
        "red_nodes": int(g.in_red.sum()),
        "blue_edges": g.num_blue_edges,
        "red_edges": g.num_red_edges,
    }


def _truth_table(truth) -> str:
    d = truth.concentrations("all")
    lines = [f"{'type':>4}  {'structure':<16} {'count':>12}  {'d_i':>10}"]
    for i, info in GRAPHLETS.items():
        lines.append(f"{i:>4}  {info.label:<16} {int(truth.counts[i - 1]):>12}  {d[i - 1]:>10.3e}")
    lines.append(f"total {truth.total}")
    return "\n".join(lines)


def cmd_exact(ns):
    from .oracle import count_exact

    g = load_graph(ns.graph)
    t0 = time.perf_counter()
    truth = count_exact(g, threads=ns.threads)
    log.info("exact counting took %.2fs", time.perf_counter() - t0)
    payload = truth.to_json()
    if ns.output:
        with open(ns.output, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
    _emit(ns, payload, _truth_table(truth))


def cmd_sample(ns):
    from .oracle import compute_M
    from .samplers import run_estimator

    g = load_graph(ns.graph)
    M = compute_M(g, ns.algo) if ns.counts else None
    est = run_estimator(
        ns.algo, g, ns.steps, ns.seed, trial=ns.trial, alpha_mode=ns.alpha_mode, burn_in=ns.burn_in, M=M
    )
    payload = est.to_json()
    if ns.output:
        with open(ns.output, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
    lines = [f"{ns.algo}: n={ns.steps} seed={ns.seed} degenerate={est.degenerate_state_count}"]
    for i, v in enumerate(est.d_hat, start=1):
        lines.append(f"{i:>4}  {GRAPHLETS[i].label:<16} {v:.4e}")
    _emit(ns, payload, "\n".join(lines))


def cmd_experiment(ns):
    from .experiments import ExperimentPlan, emit_report, run_experiment
    from .oracle import GroundTruth, count_exact

    g = load_graph(ns.graph)
    if ns.truth:
        with open(ns.truth, encoding="utf-8") as fh:
            truth = GroundTruth.from_json(json.load(fh))
    else:
        truth = count_exact(g, threads=ns.threads)
    plan = ExperimentPlan(
        algorithms=tuple(ns.algos), trials=ns.trials, steps=ns.steps, checkpoint_stride=ns.stride,
        base_seed=ns.seed, target=ns.target, alpha_mode=ns.alpha_mode, burn_in=ns.burn_in,
        threads=ns.threads, graph_path=ns.graph,
    )
    try:
        plan.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    series = run_experiment(plan, truth, g)
    files = emit_report(series, ns.output)
    final = {a: [None if np.isnan(v) else float(v) for v in series.final("mre", a)] for a in series.algorithms}
    lines = [f"wrote {len(files)} files to {ns.output}", "final MRE per type:"]
    for a, vals in final.items():
        lines.append(f"  {a:<7} " + " ".join("   nan" if v is None else f"{v:6.3f}" for v in vals))
    _emit(ns, {"output": ns.output, "files": files, "final_mre": final}, "\n".join(lines))


def cmd_report(ns):
    from .experiments import emit_report, series_from_json

    with open(ns.results, encoding="utf-8") as fh:
        series = series_from_json(json.load(fh))
    out = ns.output or os.path.dirname(os.path.abspath(ns.results))
    files = emit_report(series, out)
    _emit(ns, {"files": files}, "\n".join(files))


def cmd_catalog(ns):
    models = list(ALGORITHMS) if ns.model == "all" else [ns.model]
    rows = catalog_rows(models)
    head = f"{'type':>4}  {'structure':<16}" + "".join(f"{m:>8}" for m in models)
    lines = [head] + [
        f"{r['type']:>4}  {r['structure']:<16}" + "".join(f"{r['alpha'][m]:>8}" for m in models) for r in rows
    ]
    _emit(ns, {"models": models, "rows": rows}, "\n".join(lines))


def cmd_diagnose(ns):
    from .oracle import bound_diagnostics, build_explicit_chain, count_exact
    from .oracle.chain import ChainTooLarge

    g = load_graph(ns.graph)
    truth = count_exact(g, threads=ns.threads)
    chain = None
    note = None
    try:
        chain = build_explicit_chain(g, ns.algo, cap=ns.chain_cap, exact=False)
    except ChainTooLarge as exc:
        note = str(exc)
    rep = bound_diagnostics(g, ns.algo, truth, chain)
    if chain is not None:
        from .samplers.states import state_from_row
        from .samplers.steps import stationary_weight

        w = np.array([float(stationary_weight(g, state_from_row(ns.algo, s), ns.algo)) for s in chain.states])
        rep["chain_max_rel_dev"] = float(np.max(np.abs(chain.pi / (w / w.sum()) - 1)))
        rep["chain_period"] = chain.period
    if note:
        rep["chain_note"] = note
    lines = [f"{k}: {v}" for k, v in rep.items()]
    _emit(ns, rep, "\n".join(lines))


COMMANDS = {
    "generate": cmd_generate,
    "ingest": cmd_ingest,
    "exact": cmd_exact,
    "sample": cmd_sample,
    "experiment": cmd_experiment,
    "report": cmd_report,
    "catalog": cmd_catalog,
    "diagnose": cmd_diagnose,
}


def _resolved_config(ns) -> dict:
    return {k: v for k, v in sorted(vars(ns).items())}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = resolve(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except UsageError as exc:
        print(f"mlg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=getattr(logging, ns.log_level), format="%(levelname)s %(name)s: %(message)s")
    print("# resolved config: " + json.dumps(_resolved_config(ns), default=str), file=sys.stderr)
    try:
        COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"mlg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, GraphFormatError) as exc:
        print(f"mlg: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # walk aborts and other runtime failures
        log.debug("runtime failure", exc_info=True)
        print(f"mlg: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
