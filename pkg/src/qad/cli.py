"""Command-line surface.

Subcommands: compute, pairwise, predict, network, simulate.  stdout carries
only data (JSON or CSV); diagnostics go to stderr.  Exit codes: 0 success,
2 usage error, 3 data error, 4 numeric/degenerate-input error.  All JSON
documents carry a top-level ``"schema": "qad/1"`` field; floats are written
with Python's shortest round-trip representation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .copula import BivariateSample
from .errors import DataError, DegenerateInputError, ExtrapolationError
from .estimator import QadOptions, qad_compute
from .pairwise import (
    baseline_correlations,
    build_network,
    filter_columns,
    influence_summary,
    pairwise_qad,
)
from .prediction import locate_strip, prediction_table
from .simulate import (
    FGM,
    SHAPE_NAMES,
    CompletelyDependent,
    Independence,
    MarshallOlkin,
    ShapeGenerator,
    convergence_experiment,
    generate_shape,
    sample_model,
)
from .tables import DEFAULT_MISSING, ingest_csv

SCHEMA = "qad/1"
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _log(message: str):
    print(message, file=sys.stderr)


def _fmt(value, precision: int) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return ""
    if isinstance(value, float):
        return f"{value:.{precision}g}"
    return str(value)


def _emit_json(obj: dict, out_path):
    text = json.dumps(obj, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_lines(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_threads() -> int:
    # permutation loops are GIL-bound numpy-small-op work: extra threads give
    # identical results (seeded per replicate) but no speedup, so default to 1
    env = os.environ.get("QAD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _load_pair(path, x_name, y_name, missing, delimiter):
    table, report = ingest_csv(path, missing=missing, delimiter=delimiter)
    for msg in report.messages():
        _log(msg)
    xs = table.column(x_name)
    ys = table.column(y_name)
    complete = ~(np.isnan(xs) | np.isnan(ys))
    n_dropped = int((~complete).sum())
    if n_dropped:
        _log(f"dropped {n_dropped} row(s) with missing values")
    if complete.sum() < 2:
        raise DegenerateInputError("fewer than 2 complete rows")
    return BivariateSample(xs[complete], ys[complete])


def _add_io_options(parser):
    parser.add_argument("--missing", action="append", default=None,
                        help="missing-value marker (repeatable; default: empty and NA)")
    parser.add_argument("--delimiter", default=None, help="field delimiter (default: sniffed)")


def _missing_set(args):
    return tuple(args.missing) if args.missing else DEFAULT_MISSING


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_compute(args) -> int:
    sample = _load_pair(args.file, args.x, args.y, _missing_set(args), args.delimiter)
    opts = QadOptions(
        permutations=args.permutations,
        seed=args.seed,
        resolution_override=args.resolution,
        threads=args.threads,
    )
    result = qad_compute(sample, opts)
    for w in result.warnings:
        _log(f"warning: {w}")
    if args.board_out:
        from .copula import checkerboard_aggregate, empirical_copula, pseudo_observations

        board = checkerboard_aggregate(
            empirical_copula(pseudo_observations(sample)), result.resolution
        )
        swapped = checkerboard_aggregate(
            empirical_copula(pseudo_observations(sample.swapped())), result.resolution
        )
        _emit_json(
            {
                "schema": SCHEMA,
                "board_xy": board.to_json_dict(),
                "board_yx": swapped.to_json_dict(),
            },
            args.board_out,
        )
    payload = {"schema": SCHEMA, "x": args.x, "y": args.y}
    payload.update(result.to_dict())
    _emit_json(payload, args.out)
    return EXIT_OK


def _pairwise_result(args):
    table, report = ingest_csv(args.file, missing=_missing_set(args), delimiter=args.delimiter)
    for msg in report.messages():
        _log(msg)
    filter_report = None
    if args.filter_ties is not None:
        table, filter_report = filter_columns(table, args.filter_ties)
        for name, prop in filter_report.dropped:
            _log(f"dropped column {name!r} (single-value proportion {prop:.3f})")
    opts = QadOptions(permutations=args.permutations, seed=args.seed)
    pw = pairwise_qad(table, opts, threads=args.threads)
    for w in pw.warnings:
        _log(f"warning: {w}")
    return table, pw, filter_report


def _matrix_json(matrix):
    return [[None if np.isnan(v) else float(v) for v in row] for row in matrix]


def _cmd_pairwise(args) -> int:
    table, pw, filter_report = _pairwise_result(args)
    corr = baseline_correlations(table)
    os.makedirs(args.out, exist_ok=True)
    prec = args.precision

    header = "var1,var2,q,p_q,a,p_a,n_used"
    lines = [header]
    k = pw.k
    for f in range(k):
        for j in range(k):
            if f == j:
                continue
            lines.append(
                ",".join(
                    [
                        pw.variables[f],
                        pw.variables[j],
                        _fmt(float(pw.q[f, j]), prec),
                        _fmt(float(pw.p_q[f, j]), prec),
                        _fmt(float(pw.asymmetry[f, j]), prec),
                        _fmt(float(pw.p_asymmetry[f, j]), prec),
                        _fmt(
                            None if np.isnan(pw.n_used[f, j]) else int(pw.n_used[f, j]),
                            prec,
                        ),
                    ]
                )
            )
    _emit_lines(lines, os.path.join(args.out, "pairwise_long.csv"))

    bundle = {
        "schema": SCHEMA,
        "variables": list(pw.variables),
        "q": _matrix_json(pw.q),
        "p_q": _matrix_json(pw.p_q),
        "asymmetry": _matrix_json(pw.asymmetry),
        "p_asymmetry": _matrix_json(pw.p_asymmetry),
        "n_used": _matrix_json(pw.n_used),
        "pearson_r": _matrix_json(corr.pearson_r),
        "pearson_r2": _matrix_json(corr.r_squared),
        "spearman_rho": _matrix_json(corr.spearman_rho),
        "permutations": pw.permutations,
    }
    _emit_json(bundle, os.path.join(args.out, "heatmap.json"))

    report_obj = {
        "schema": SCHEMA,
        "filtered": filter_report is not None,
        "dropped": [
            {"column": name, "single_value_proportion": prop}
            for name, prop in (filter_report.dropped if filter_report else ())
        ],
    }
    _emit_json(report_obj, os.path.join(args.out, "filter_report.json"))
    _log(f"wrote pairwise outputs to {args.out}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    sample = _load_pair(args.file, args.x, args.y, _missing_set(args), args.delimiter)
    table = prediction_table(sample, direction=args.direction)
    if args.table_out:
        if args.table_out.endswith(".json"):
            _emit_json({"schema": SCHEMA, **table.to_json_dict()}, args.table_out)
        else:
            _emit_lines(table.to_csv_lines(), args.table_out)
    breaks = table.conditioning_breaks
    strip = locate_strip(breaks, args.at)
    intervals = [
        {"low": lo, "high": hi, "probability": p}
        for lo, hi, p in table.merged_row(strip)
    ]
    payload = {
        "schema": SCHEMA,
        "direction": args.direction,
        "at": args.at,
        "strip": strip + 1,
        "conditioning_interval": [float(breaks[strip]), float(breaks[strip + 1])],
        "resolution": table.resolution,
        "intervals": intervals,
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def _cmd_network(args) -> int:
    _, pw, _ = _pairwise_result(args)
    net = build_network(pw, q_threshold=args.q_threshold, alpha=args.alpha)
    infl = influence_summary(pw, method=args.influence_test)
    os.makedirs(args.out, exist_ok=True)
    prec = args.precision

    lines = ["source,target,weight"]
    for src, dst, w in net.edges:
        lines.append(f"{src},{dst},{_fmt(w, prec)}")
    _emit_lines(lines, os.path.join(args.out, "edges.csv"))

    lines = ["node,degree,betweenness,hub_score"]
    for name in net.nodes:
        lines.append(
            ",".join(
                [
                    name,
                    str(net.degree[name]),
                    _fmt(net.betweenness[name], prec),
                    _fmt(net.hub_score[name], prec),
                ]
            )
        )
    _emit_lines(lines, os.path.join(args.out, "node_metrics.csv"))

    lines = [
        "variable,median_influence,q25_influence,q75_influence,"
        "mean_influence_given,mean_influence_received,p_median_positive"
    ]
    for i, name in enumerate(infl.variables):
        lines.append(
            ",".join(
                [
                    name,
                    _fmt(float(infl.median_influence[i]), prec),
                    _fmt(float(infl.q25_influence[i]), prec),
                    _fmt(float(infl.q75_influence[i]), prec),
                    _fmt(float(infl.mean_influence_given[i]), prec),
                    _fmt(float(infl.mean_influence_received[i]), prec),
                    _fmt(float(infl.p_median_positive[i]), prec),
                ]
            )
        )
    _emit_lines(lines, os.path.join(args.out, "influence.csv"))

    import networkx as nx

    graph = nx.DiGraph()
    graph.add_nodes_from(net.nodes)
    for src, dst, w in net.edges:
        graph.add_edge(src, dst, weight=w)
    nx.write_graphml(graph, os.path.join(args.out, "network.graphml"))
    _log(f"wrote network outputs to {args.out}")
    return EXIT_OK


def _parse_model(args):
    if args.model == "mo":
        return MarshallOlkin(args.alpha, args.beta)
    if args.model == "fgm":
        return FGM(args.theta)
    if args.model == "cd":
        return CompletelyDependent(args.slope)
    return Independence()


def _write_sample_csv(sample, out_path, precision):
    lines = ["x,y"]
    for x, y in zip(sample.xs, sample.ys):
        lines.append(f"{_fmt(float(x), precision)},{_fmt(float(y), precision)}")
    _emit_lines(lines, out_path)


def _cmd_simulate(args) -> int:
    prec = args.precision
    if args.model == "shape":
        gen = ShapeGenerator(shape=args.name, n=args.n[0], noise=args.noise)
        sample = generate_shape(gen, args.seed)
        _write_sample_csv(sample, args.out, prec)
        return EXIT_OK
    model = _parse_model(args)
    if args.reps == 1 and len(args.n) == 1:
        # single replicate: emit the raw sample so it can feed `compute`
        sample = sample_model(model, args.n[0], np.random.SeedSequence(entropy=args.seed, spawn_key=(0, 0)))
        _write_sample_csv(sample, args.out, prec)
        return EXIT_OK
    result = convergence_experiment(model, args.n, args.reps, args.seed, threads=args.threads)
    lines = ["model,params,n,replicate,q_xy,q_yx,ref_xy,ref_yx"]
    for row in result.rows:
        lines.append(
            ",".join(
                [
                    row.model,
                    row.params,
                    str(row.n),
                    str(row.replicate),
                    _fmt(row.q_xy, prec),
                    _fmt(row.q_yx, prec),
                    _fmt(row.ref_xy, prec),
                    _fmt(row.ref_yx, prec),
                ]
            )
        )
    _emit_lines(lines, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _sizes(text: str):
    try:
        sizes = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be integers") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qad",
        description="Directional dependence estimation via checkerboard copulas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    threads_default = _default_threads()

    p = sub.add_parser("compute", help="dependence of one column pair")
    p.add_argument("file")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--permutations", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--threads", type=int, default=threads_default)
    p.add_argument("--out", default=None)
    p.add_argument("--board-out", default=None,
                   help="also write the fitted checkerboard mass matrices as JSON")
    _add_io_options(p)
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("pairwise", help="dependence matrices over all column pairs")
    p.add_argument("file")
    p.add_argument("--filter-ties", type=float, default=None, metavar="P",
                   help="drop columns whose top value share is >= P")
    p.add_argument("--permutations", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=threads_default)
    p.add_argument("--precision", type=int, default=6)
    p.add_argument("--out", required=True, help="output directory")
    _add_io_options(p)
    p.set_defaults(func=_cmd_pairwise)

    p = sub.add_parser("predict", help="conditional prediction at a data value")
    p.add_argument("file")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--at", type=float, required=True)
    p.add_argument("--direction", choices=("xy", "yx"), default="xy")
    p.add_argument("--out", default=None)
    p.add_argument("--table-out", default=None,
                   help="also write the full prediction table (.json or CSV)")
    _add_io_options(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("network", help="thresholded dependency network")
    p.add_argument("file")
    p.add_argument("--q-threshold", type=float, default=0.325)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--permutations", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--filter-ties", type=float, default=None, metavar="P")
    p.add_argument("--threads", type=int, default=threads_default)
    p.add_argument("--precision", type=int, default=6)
    p.add_argument("--influence-test", choices=("sign", "signrank"), default="sign")
    p.add_argument("--out", required=True, help="output directory")
    _add_io_options(p)
    p.set_defaults(func=_cmd_network)

    p = sub.add_parser("simulate", help="samples and convergence experiments")
    model_sub = p.add_subparsers(dest="model", required=True)

    def common_sim(sp, with_reps=True):
        sp.add_argument("-n", type=_sizes, required=True,
                        help="sample size, or comma-separated sizes for experiments")
        if with_reps:
            sp.add_argument("--reps", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=threads_default)
        sp.add_argument("--precision", type=int, default=6)
        sp.add_argument("--out", default=None)

    sp = model_sub.add_parser("mo", help="Marshall-Olkin copula")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    common_sim(sp)
    sp = model_sub.add_parser("fgm", help="Farlie-Gumbel-Morgenstern copula")
    sp.add_argument("--theta", type=float, required=True)
    common_sim(sp)
    sp = model_sub.add_parser("cd", help="completely dependent copula y = a*x mod 1")
    sp.add_argument("--slope", type=int, required=True)
    common_sim(sp)
    sp = model_sub.add_parser("independence", help="independent uniforms")
    common_sim(sp)
    sp = model_sub.add_parser("shape", help="benchmark dependence shapes")
    sp.add_argument("name", choices=SHAPE_NAMES)
    sp.add_argument("-a", "--noise", type=float, default=0.0)
    common_sim(sp, with_reps=False)
    sp.set_defaults(reps=1)
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) == "network" and args.permutations < 1:
        _log("error: the network command requires --permutations > 0")
        return EXIT_USAGE
    if getattr(args, "threads", None) is not None and args.threads < 1:
        _log("error: --threads must be >= 1")
        return EXIT_USAGE
    try:
        return args.func(args)
    except ExtrapolationError as exc:
        _log(f"error: {exc}")
        return EXIT_DATA
    except DataError as exc:
        _log(f"error: {exc}")
        return EXIT_DATA
    except DegenerateInputError as exc:
        _log(f"error: {exc}")
        return EXIT_NUMERIC
    except ValueError as exc:
        _log(f"error: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
