"""Command line entry point.

Exit codes: 0 success, 1 invalid input (arguments, parameters, spec files),
2 failure while running.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .graph_core import (
    BRUTE_FORCE_CAP,
    MIXING_CAP,
    GraphError,
    diameter,
    general_conductance,
    is_strongly_connected,
    mixing_time_empirical,
    read_graph,
    stationary_distribution,
    write_graph,
)
from .harness import (
    ESTIMATORS,
    GENERATORS,
    PAIRS,
    OracleConfig,
    SpecError,
    budget_sweep,
    build_graph,
    build_pair,
    distinguish_bound,
    load_spec,
    reports_to_csv,
    run_estimator,
    run_experiment,
)
from .estimators import EstimateReport

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _extra_params(tokens: list[str]) -> dict[str, str]:
    """``--key value`` pairs left over after the fixed options."""
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--") or len(tok) < 3:
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        else:
            val = next(it, None)
            if val is None:
                raise UsageError(f"missing value for {tok}")
        out[key.replace("-", "_")] = val
    return out


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness (default 0)")

    p = _Parser(prog="graphsize", description="Graph-size estimation toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="write a generated graph to a file",
                       epilog="generators: " + ", ".join(sorted(GENERATORS)))
    g.add_argument("generator")
    g.add_argument("-o", "--output", required=True)

    a = sub.add_parser("analyze", parents=[common], help="print statistics of a graph file")
    a.add_argument("graph")
    a.add_argument("--epsilon", type=float, default=0.25, help="epsilon for the general conductance")
    a.add_argument("--heuristic", action="store_true", help="allow a heuristic conductance bound above the exact cap")

    e = sub.add_parser("estimate", parents=[common], help="run one estimator on a graph file",
                       epilog="estimators: " + ", ".join(sorted(ESTIMATORS)))
    e.add_argument("estimator")
    e.add_argument("graph")
    e.add_argument("--kind", default=None, help="oracle kind")
    e.add_argument("--init", default="fixed", help="init policy: fixed, uniform or stationary")
    e.add_argument("--init-node", type=int, default=0)
    e.add_argument("--budget", type=int, default=None)
    e.add_argument("--log-transcript", default=None, help="write the oracle transcript to this file")

    x = sub.add_parser("experiment", parents=[common], help="run an experiment spec file")
    x.add_argument("spec")
    x.add_argument("-o", "--output", default=None, help="CSV path (overrides the spec)")
    x.add_argument("--workers", type=int, default=None)
    x.add_argument("--log-transcripts", default=None, metavar="DIR")

    d = sub.add_parser("distinguish", parents=[common], help="accuracy of telling a gadget pair apart",
                       epilog="pairs: " + ", ".join(sorted(PAIRS)))
    d.add_argument("pair")
    d.add_argument("--kind", default="stationary", help="oracle kind")
    d.add_argument("--trials", type=int, default=400)
    group = d.add_mutually_exclusive_group(required=True)
    group.add_argument("--budget", type=int, nargs="+", help="absolute query budgets")
    group.add_argument("--budget-factor", type=float, nargs="+",
                       help="budgets as multiples of the pair's query scale (1/||pi|| or n)")
    return p


def _cmd_generate(args, extra, out):
    rng = np.random.default_rng(args.seed)
    g = build_graph(args.generator, extra, rng)
    write_graph(g, args.output)
    print(f"wrote {args.output}: n={g.n} m={g.m}", file=out)


def _fmt(x: float) -> str:
    return repr(float(x))


def _cmd_analyze(args, extra, out):
    if extra:
        raise UsageError(f"unexpected arguments {sorted(extra)}")
    g = read_graph(args.graph)
    lines = [
        f"n={g.n}",
        f"m={g.m}",
        f"directed={str(g.directed).lower()}",
        f"diameter={diameter(g):g}",
        f"d_avg={_fmt(g.average_degree())}",
    ]
    if is_strongly_connected(g):
        pi = stationary_distribution(g)
        lines.append("pi=" + ",".join(f"{p:.12g}" for p in pi.probs))
        lines.append(f"pi_norm={_fmt(pi.two_norm())}")
        if g.n <= MIXING_CAP:
            lines.append(f"t_mix={mixing_time_empirical(g)}")
        else:
            lines.append("t_mix=skipped (n above the exact-propagation cap)")
    else:
        lines.append("pi=undefined (not strongly connected)")
    if g.n <= BRUTE_FORCE_CAP or args.heuristic:
        res = general_conductance(g, args.epsilon, heuristic=args.heuristic)
        tag = "" if res.exact else " (heuristic upper bound)"
        lines.append(f"phi={_fmt(res.phi)}{tag}")
    else:
        lines.append(f"phi=skipped (n above {BRUTE_FORCE_CAP}; pass --heuristic)")
    print("\n".join(lines), file=out)


def _cmd_estimate(args, extra, out):
    g = read_graph(args.graph)
    cfg = OracleConfig(args.kind, args.init, args.init_node, args.budget)
    res = run_estimator(g, args.estimator, extra, args.seed, cfg, record=args.log_transcript is not None)
    if args.log_transcript and res.transcript is not None:
        with open(args.log_transcript, "w") as fh:
            fh.writelines(line + "\n" for line in res.transcript)
    rep = EstimateReport(args.estimator, args.graph, args.seed, res.params, res.estimate, res.queries)
    out.write(reports_to_csv([rep]))


def _cmd_experiment(args, extra, out):
    import dataclasses

    if extra:
        raise UsageError(f"unexpected arguments {sorted(extra)}")
    spec = load_spec(args.spec)
    changes = {}
    if args.output is not None:
        changes["output"] = args.output
    if args.seed_given:
        changes["master_seed"] = args.seed
    if changes:
        spec = dataclasses.replace(spec, **changes)
        spec.validate()
    reports = run_experiment(spec, transcript_dir=args.log_transcripts, workers=args.workers)
    if not spec.output:
        out.write(reports_to_csv(reports))
    else:
        print(f"wrote {len(reports)} rows to {spec.output}", file=out)


def _cmd_distinguish(args, extra, out):
    rng = np.random.default_rng(args.seed)
    pair = build_pair(args.pair, extra, rng)
    if args.budget is not None:
        budgets = args.budget
    else:
        scale = distinguish_bound(pair, args.kind)
        budgets = [max(1, int(f * scale)) for f in args.budget_factor]
    if any(b < 1 for b in budgets):
        raise UsageError("budgets must be at least 1")
    results = budget_sweep(pair, budgets, args.trials, rng, args.kind)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["budget", "trials", "correct", "accuracy", "ci_low", "ci_high"])
    for r in results:
        w.writerow([r.budget, r.trials, r.correct, f"{r.accuracy:.4f}", f"{r.ci_low:.4f}", f"{r.ci_high:.4f}"])


_COMMANDS = {
    "generate": _cmd_generate,
    "analyze": _cmd_analyze,
    "estimate": _cmd_estimate,
    "experiment": _cmd_experiment,
    "distinguish": _cmd_distinguish,
}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
        extra = _extra_params(rest)
        args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_INVALID
    try:
        _COMMANDS[args.command](args, extra, out)
    except (UsageError, SpecError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except GraphError as exc:
        # bad generator parameters or a malformed graph file
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
