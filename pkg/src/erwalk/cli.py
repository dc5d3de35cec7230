"""Command-line front end.

Exit codes: 0 success, 2 usage or input-format error, 3 domain error
(disconnected input and similar), 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from erwalk import __version__
from erwalk._rng import bit_generator, derive_seed
from erwalk.errors import (
    ConvergenceFailure,
    Disconnected,
    EdgeListError,
    ErwalkError,
    GapZeroDivergence,
    SingularSystem,
)
from erwalk.experiments import PRule, SweepPlan, ratio_check, run_sweep, write_csv
from erwalk.graph import GnpParams, is_connected, read_edge_list, sample_gnp, write_edge_list
from erwalk.hitting import (
    commute_time_bounds,
    commute_time_matrix,
    hitting_report,
    hitting_time_spectral,
    random_start_time,
)
from erwalk.oracle import simulate_walk
from erwalk.spectral import decompose, lambda2_relation

EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC = 2, 3, 4
PAIRS_STREAM = 2**63


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _prob(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return value


def _grid(text):
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n-grid {text!r}") from None
    if not values or any(v < 1 for v in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise argparse.ArgumentTypeError("n-grid must be strictly increasing positive integers")
    return values


def _rule(text):
    try:
        return PRule.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="erwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="sample G(n, p) and write its edge list")
    gen.add_argument("--nodes", type=_positive_int, required=True)
    gen.add_argument("--prob", type=_prob, required=True)
    gen.add_argument("--seed", type=_seed, required=True)
    gen.add_argument("--out", default="-")

    ana = sub.add_parser("analyze", help="hitting-time report for one graph")
    ana.add_argument("--graph")
    ana.add_argument("--nodes", type=_positive_int)
    ana.add_argument("--prob", type=_prob)
    ana.add_argument("--seed", type=_seed)
    tgt = ana.add_mutually_exclusive_group()
    tgt.add_argument("--target", type=_nonneg_int)
    tgt.add_argument("--all-targets", action="store_true")
    ana.add_argument("--pairs", type=_nonneg_int, default=0)
    ana.add_argument("--json", action="store_true")
    ana.add_argument("--out", default="-")

    sim = sub.add_parser("simulate", help="Monte-Carlo hitting time between two vertices")
    sim.add_argument("--graph", required=True)
    sim.add_argument("--source", type=_nonneg_int, required=True)
    sim.add_argument("--target", type=_nonneg_int, required=True)
    sim.add_argument("--samples", type=_positive_int, required=True)
    sim.add_argument("--seed", type=_seed, required=True)
    sim.add_argument("--max-steps", type=_positive_int)
    sim.add_argument("--workers", type=_positive_int, default=1)
    sim.add_argument("--out", default="-")

    swp = sub.add_parser("sweep", help="scaling sweep over n, written as CSV")
    swp.add_argument("--n-grid", type=_grid, required=True)
    swp.add_argument("--p-rule", type=_rule, required=True)
    swp.add_argument("--replicates", type=_positive_int, required=True)
    swp.add_argument("--seed", type=_seed, required=True)
    swp.add_argument("--out", required=True)
    swp.add_argument("--resample-limit", type=_nonneg_int, default=100)
    swp.add_argument("--workers", type=_positive_int, default=1)
    return parser


def _emit(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(_finite(obj), indent=2, allow_nan=False) + "\n"


def _finite(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _load_graph(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read graph file: {exc}") from None
    try:
        return read_edge_list(text)
    except EdgeListError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _vertex(g, v, flag):
    if v >= g.n:
        raise UsageError(f"{flag} {v} is out of range for n={g.n}")
    return v


def cmd_gen(args):
    g = sample_gnp(GnpParams(args.nodes, args.prob, args.seed))
    _emit(write_edge_list(g) + "\n", args.out)


def _analysis(args):
    if args.graph is not None:
        if any(v is not None for v in (args.nodes, args.prob, args.seed)):
            raise UsageError("use either --graph or --nodes/--prob/--seed, not both")
        g = _load_graph(args.graph)
        p, seed = None, None
    else:
        if None in (args.nodes, args.prob, args.seed):
            raise UsageError("--nodes, --prob and --seed are required without --graph")
        p, seed = args.prob, args.seed
        g = sample_gnp(GnpParams(args.nodes, p, seed))
    if args.target is not None:
        _vertex(g, args.target, "--target")
    if args.pairs and g.n < 2:
        raise UsageError("--pairs needs at least two vertices")
    if g.n < 2 or not is_connected(g):
        raise Disconnected()

    d = decompose(g)
    h_start = random_start_time(d)
    p_used = p if p else 2.0 * g.edge_count / (g.n * (g.n - 1))
    rel = lambda2_relation(g, p_used, d)
    doc = {
        "n": g.n,
        "p": p,
        "seed": seed,
        "edge_count": g.edge_count,
        "min_degree": int(g.degrees.min()),
        "max_degree": int(g.degrees.max()),
        "H_start": h_start,
        "gap": 1.0 - d.lambda_star,
        "lambda2_abs": abs(d.lambda2),
        "lambdaN_abs": abs(d.lambdaN),
        "ratio_max_dev": ratio_check(g),
        "lambda2_relation": {
            "lhs": rel.lhs,
            "rhs": rel.rhs,
            "nu2_over_Np": rel.nu2_over_Np,
            "remainder_norm": rel.remainder,
            "complete": rel.complete,
            "p_used": p_used,
        },
    }
    if args.all_targets:
        doc["reports"] = [hitting_report(g, d, j, p, seed, h_start).to_dict() for j in range(g.n)]
    else:
        j = args.target if args.target is not None else 0
        doc["report"] = hitting_report(g, d, j, p, seed, h_start).to_dict()
    if args.pairs:
        rng = np.random.Generator(bit_generator(seed or 0, PAIRS_STREAM))
        kappa = commute_time_matrix(g, d)
        pairs = []
        for _ in range(args.pairs):
            i, j = (int(v) for v in rng.choice(g.n, size=2, replace=False))
            lower, upper = commute_time_bounds(g, d, i, j)
            pairs.append({
                "i": i,
                "j": j,
                "h_ij": hitting_time_spectral(g, d, i, j),
                "h_ji": hitting_time_spectral(g, d, j, i),
                "commute": float(kappa[i, j]),
                "lower": lower,
                "upper": upper,
            })
        doc["pairs"] = pairs
    return doc


def cmd_analyze(args):
    doc = _analysis(args)
    if args.json:
        _emit(_json(doc), args.out)
        return
    lines = [f"{k}: {v}" for k, v in doc.items() if not isinstance(v, (dict, list))]
    rel = doc["lambda2_relation"]
    lines.append(f"lambda2 relation: {rel['lhs']:.6g} <= {rel['rhs']:.6g}")
    for rep in doc.get("reports", [doc.get("report")]):
        upper = "inf" if rep["upper"] is None else f"{rep['upper']:.6g}"
        lines.append(f"target {rep['target']}: H = {rep['H_target']:.10g} in [{rep['lower']:.6g}, {upper}]")
    for pr in doc.get("pairs", []):
        upper = "inf" if pr["upper"] is None else f"{pr['upper']:.6g}"
        lines.append(f"commute {pr['i']}-{pr['j']}: {pr['commute']:.10g} in [{pr['lower']:.6g}, {upper}]")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_simulate(args):
    g = _load_graph(args.graph)
    _vertex(g, args.source, "--source")
    _vertex(g, args.target, "--target")
    if args.source == args.target:
        raise UsageError("--source and --target must differ")
    if not is_connected(g):
        raise Disconnected()
    est = simulate_walk(g, args.source, args.target, args.samples, args.seed,
                        args.max_steps, workers=args.workers)
    exact = hitting_time_spectral(g, decompose(g), args.source, args.target)
    if est.std_error > 0:
        z = (est.mean - exact) / est.std_error
    else:
        z = 0.0 if abs(est.mean - exact) <= 1e-9 * max(1.0, exact) else math.copysign(math.inf, est.mean - exact)
    doc = {
        "source": args.source,
        "target": args.target,
        "seed": args.seed,
        "max_steps": args.max_steps if args.max_steps else 100 * g.n * g.n,
        **est.to_dict(),
        "h_spectral": exact,
        "z_score": z,
    }
    _emit(_json(doc), args.out)


def cmd_sweep(args):
    try:
        plan = SweepPlan(args.n_grid, args.p_rule, args.replicates, args.seed, args.resample_limit)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def progress(rec):
        state = "ok" if rec.connected else "DISCONNECTED"
        print(f"n={rec.n} replicate={rec.replicate} p={rec.p:.6g} {state} resamples={rec.resamples_used}",
              file=sys.stderr, flush=True)

    records = run_sweep(plan, workers=args.workers, progress=progress)
    if args.out == "-":
        write_csv(records, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_csv(records, fh)


COMMANDS = {"gen": cmd_gen, "analyze": cmd_analyze, "simulate": cmd_simulate, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"erwalk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Disconnected:
        print("graph is disconnected", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceFailure, SingularSystem, GapZeroDivergence) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ErwalkError as exc:
        print(f"erwalk {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    sys.exit(main())
