"""Command-line front end: generate graphs, emit theory tables, analyze,
run concentration experiments.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 internal
invariant violation (a structural check failed on generated output, which
indicates a generator bug).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, analysis, io, theory
from .errors import (
    InternalInvariantViolation,
    InvalidParameters,
    KTreeLabError,
    ParseError,
    ResourceExhausted,
)
from .generator import ProcessParams, build_tree_decomposition, generate, generate_partial

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ktree-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ktree-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate a (partial) random k-tree edge list")
    _add_kns(p)
    p.add_argument("--out", required=True, help="edge-list output path")
    p.add_argument("--td", help="also write the width-k tree decomposition (PACE format)")
    p.add_argument(
        "--partial-b",
        type=float,
        default=None,
        metavar="B",
        help="thin to a partial k-tree keeping round(B*k) attachment edges per vertex; "
        "with --td the decomposition of the underlying full k-tree is written "
        "(still valid for the subgraph)",
    )
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("theory", help="emit beta / closed-form / expectation-DP tables")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True, help="largest tabulated degree")
    p.add_argument("--n", type=int, default=None, help="also run the expectation DP up to n")
    p.add_argument("--dp-tol", type=float, default=1e-3,
                   help="tolerated DP overflow mass past dmax, as a fraction of n")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--json", help="also write the JSON variant here")
    p.set_defaults(handler=cmd_theory)

    p = sub.add_parser("analyze", help="histogram, deviation-from-theory and tail-exponent fit")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="analyze an existing edge-list file")
    src.add_argument("--k", type=int, help="generate in-process (with --n, --seed)")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--d-cut", type=int, default=50, help="largest degree in the deviation report")
    p.add_argument("--d-min", type=int, default=analysis.DEFAULT_FIT_D_MIN,
                   help="smallest degree used by the tail fit")
    p.add_argument("--out-prefix", required=True,
                   help="writes PREFIX.histogram.csv, PREFIX.deviation.csv, PREFIX.fit.json")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("concentration", help="multi-trial spread of X_d vs the Azuma bound")
    _add_kns(p)
    p.add_argument("--d", type=int, default=None, help="degree to track (default: k)")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--threads", type=int, default=None,
                   help="trial parallelism (default: KTREE_LAB_THREADS or all cores)")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.set_defaults(handler=cmd_concentration)
    return parser


def _add_kns(p):
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)


def cmd_generate(args) -> int:
    params = ProcessParams(k=args.k, n=args.n, seed=args.seed)
    if args.partial_b is not None:
        graph = generate_partial(params, args.partial_b)
        tree = graph.base
    else:
        graph = tree = generate(params)
    io.write_edge_list(args.out, graph)
    print(f"wrote {args.out} ({len(graph.edge_array())} edges)")
    if args.td:
        td = build_tree_decomposition(tree)
        io.write_pace(args.td, td, params.n)
        print(f"wrote {args.td} ({td.num_bags} bags, width {td.width})")
    return EXIT_OK


def cmd_theory(args) -> int:
    if args.k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {args.k})")
    dist = theory.beta_table(args.k, args.dmax)
    dp = None
    if args.n is not None:
        dp = theory.expected_histogram_dp(args.k, args.n, args.dmax, overflow_tol=args.dp_tol)
    if args.out:
        io.write_theory_csv(args.out, dist, dp)
        print(f"wrote {args.out}")
    if args.json:
        io.write_theory_json(args.json, dist, dp)
        print(f"wrote {args.json}")
    if not args.out and not args.json:
        io.write_theory_csv(sys.stdout, dist, dp)
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.input:
        graph = io.read_edge_list(args.input)
        seed = graph.seed
    else:
        if args.n is None or args.seed is None:
            raise InvalidParameters("--k requires --n and --seed")
        params = ProcessParams(k=args.k, n=args.n, seed=args.seed)
        graph = generate(params)
        seed = args.seed
        if graph.n >= graph.k + 2:
            check = analysis.verify_lemma1(graph)
            if not check.passed:
                raise InternalInvariantViolation(f"structural check failed: {check.failure}")

    hist = analysis.degree_histogram(graph)
    d_cut = max(graph.k, min(args.d_cut, hist.max_degree()))
    dist = theory.beta_table(graph.k, max(d_cut, hist.max_degree()))
    report = analysis.deviation_report(hist, dist, d_cut)

    fit, reason = None, None
    try:
        fit = analysis.fit_tail_exponent(hist, args.d_min)
    except analysis.InsufficientTail as exc:
        reason = str(exc)

    prefix = args.out_prefix
    io.write_histogram_csv(f"{prefix}.histogram.csv", hist, seed=seed)
    io.write_deviation_csv(f"{prefix}.deviation.csv", report, seed=seed)
    io.write_fit_json(f"{prefix}.fit.json", fit, k=graph.k, n=graph.n, seed=seed,
                      trials=hist.trials, reason=reason)
    for suffix in (".histogram.csv", ".deviation.csv", ".fit.json"):
        print(f"wrote {prefix}{suffix}")
    print(
        f"k={graph.k} n={graph.n} max_abs_error={report.max_abs_error:.6g} "
        f"tvd={report.total_variation_distance:.6g}"
        + (f" gamma_hat={fit.gamma_hat:.4g}" if fit else " (tail too short for a fit)")
    )
    return EXIT_OK


def cmd_concentration(args) -> int:
    report = analysis.concentration_experiment(
        k=args.k, n=args.n, d=args.d, trials=args.trials, seed=args.seed, threads=args.threads
    )
    if args.out:
        io.write_concentration_json(args.out, report)
        print(f"wrote {args.out}")
    else:
        import json

        print(json.dumps(io.concentration_to_dict(report), indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # raised by argparse for usage errors / --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except InvalidParameters as exc:
        print(f"ktree-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"ktree-lab: {exc}", file=sys.stderr)
        return EXIT_IO
    except InternalInvariantViolation as exc:
        print(f"ktree-lab: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ResourceExhausted as exc:
        print(f"ktree-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KTreeLabError as exc:
        print(f"ktree-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
