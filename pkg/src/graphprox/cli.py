"""Command-line surface: single queries, benchmark sweeps, and trace emission.

Four subcommands over a shared set of flags:

- ``stats``      graph summary JSON (optionally with the spectral norm)
- ``pairwise``   bound trace for one vertex pair, CSV + JSON, optional CG baseline
- ``column``     one Katz or commute column, CSV + oracle-quality report
- ``bench``      sweeps: pairwise matvec comparison, column quality, localization

Vertex arguments are external (original file) ids; preprocessing relabels
vertices, and the relabel map is written next to the outputs.  Every
command is deterministic given the input file, flags, and seed; wall-clock
columns are the only nondeterministic output fields.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .commute_column import commute_column, inverse_degree_heuristic
from .graph import Graph, load_graph
from .katz_column import katz_column_push, participation_trace
from .metrics import (
    TopKSet,
    kendall_tau_on_exact_topk,
    performance_ratio,
    precision_at_k,
    sample_vertex_pairs,
    sample_vertices,
)
from .operators import spectral_norm_estimate
from .pairwise import (
    DEFAULT_LAMBDA_LO,
    DEFAULT_TAU,
    cg_pairwise_baseline,
    commute_pairwise_bounds,
    katz_pairwise_bounds,
)
from .solvers import DENSE_CUTOFF, dense_reference_matrices

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphprox",
        description="Katz scores and commute times with certified bounds",
    )
    parser.add_argument("--graph", required=True, help="input graph file")
    parser.add_argument("--format", default="edges0", choices=["edges0", "edges1", "mtx"],
                        help="input format (0/1-based edge list or MatrixMarket)")
    parser.add_argument("--alpha", default=None,
                        help="Katz damping: a float, or 'hard' for 1/(sigma_max+1)")
    parser.add_argument("--lambda-lo", type=float, default=DEFAULT_LAMBDA_LO,
                        help="prescribed lower spectrum bound")
    parser.add_argument("--lambda-hi", type=float, default=None,
                        help="prescribed upper spectrum bound (default: operator 1-norm)")
    parser.add_argument("--tau", type=float, default=DEFAULT_TAU,
                        help="stopping tolerance")
    parser.add_argument("--seed", type=int, default=0, help="sampling seed")
    parser.add_argument("--max-iter", type=int, default=None, help="iteration cap")
    parser.add_argument("--max-pushes", type=int, default=None, help="push cap")
    parser.add_argument("--scaling", default="degree", choices=["residual", "degree"],
                        help="push priority: raw residual or degree-scaled")
    parser.add_argument("--out-dir", default=None, help="directory for output files")

    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="graph summary JSON")
    p_stats.add_argument("--spectral-norm", action="store_true",
                         help="include a sigma_max estimate")

    p_pair = sub.add_parser("pairwise", help="bound trace for one pair")
    p_pair.add_argument("kind", choices=["katz", "commute"])
    p_pair.add_argument("-i", type=int, required=True, help="external id of the first vertex")
    p_pair.add_argument("-j", type=int, required=True, help="external id of the second vertex")
    p_pair.add_argument("--baseline", action="store_true",
                        help="also run the CG baseline and record its estimates")

    p_col = sub.add_parser("column", help="one column with oracle-quality report")
    p_col.add_argument("kind", choices=["katz", "commute"])
    p_col.add_argument("-i", type=int, required=True, help="external id of the source vertex")
    p_col.add_argument("--k", default="10,25,100,1000",
                       help="comma-separated k values for precision/tau reporting")

    p_bench = sub.add_parser("bench", help="benchmark sweeps")
    p_bench.add_argument("suite", choices=["pairwise", "column", "localization"])
    p_bench.add_argument("--kind", default="katz", choices=["katz", "commute"])
    p_bench.add_argument("--scheme", default="random",
                         choices=["random", "degree_correlated"])
    p_bench.add_argument("--count", type=int, default=None,
                         help="number of pairs/columns (scheme defaults apply)")
    return parser


def _load(args) -> Graph:
    return load_graph(args.graph, args.format)


def _out_dir(args) -> Path:
    out = Path(args.out_dir) if args.out_dir else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_vertex_map(graph: Graph, out: Path) -> Path:
    path = out / "vertex_map.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["external_id", "internal_id"])
        for internal, external in enumerate(graph.original_ids):
            writer.writerow([int(external), internal])
    return path


def _resolve_vertex(graph: Graph, external_id: int, map_path: Path) -> int:
    try:
        return graph.to_internal(external_id)
    except KeyError:
        raise SystemExit(
            f"vertex {external_id} is not in the retained component; "
            f"see the relabel map at {map_path}"
        )


def _resolve_alpha_sigma(args, graph: Graph) -> tuple[float, float | None]:
    """The damping value plus the spectral norm when it had to be computed."""
    if args.alpha is None:
        raise SystemExit("this command needs --alpha (a float or 'hard')")
    if args.alpha == "hard":
        sigma = spectral_norm_estimate(graph, seed=args.seed)
        return 1.0 / (sigma + 1.0), sigma
    try:
        value = float(args.alpha)
    except ValueError:
        raise SystemExit(f"--alpha must be a float or 'hard', got {args.alpha!r}")
    if value <= 0:
        raise SystemExit("--alpha must be positive")
    return value, None


def _resolve_alpha(args, graph: Graph) -> float:
    return _resolve_alpha_sigma(args, graph)[0]


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _dump_json(payload: dict, path: Path | None) -> None:
    text = json.dumps(payload, indent=2, default=_json_default)
    print(text)
    if path is not None:
        path.write_text(text + "\n")


def cmd_stats(args) -> int:
    graph = _load(args)
    payload = graph.summary()
    if args.spectral_norm:
        payload["sigma_max"] = spectral_norm_estimate(graph, seed=args.seed)
    out = Path(args.out_dir) if args.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    _dump_json(payload, out / "stats.json" if out else None)
    return 0


def cmd_pairwise(args) -> int:
    graph = _load(args)
    out = _out_dir(args)
    map_path = _write_vertex_map(graph, out)
    i = _resolve_vertex(graph, args.i, map_path)
    j = _resolve_vertex(graph, args.j, map_path)
    common = dict(lambda_lo=args.lambda_lo, lambda_hi=args.lambda_hi,
                  tau=args.tau, max_iter=args.max_iter)
    if args.kind == "commute":
        trace = commute_pairwise_bounds(graph, i, j, **common)
        alpha = None
        report_scale = float(graph.volume)
    else:
        alpha = _resolve_alpha(args, graph)
        trace = katz_pairwise_bounds(graph, alpha, i, j, **common)
        report_scale = 1.0

    baseline = None
    if args.baseline:
        baseline = cg_pairwise_baseline(graph, args.kind, i, j, alpha=alpha,
                                        tol=args.tau, max_iter=args.max_iter)

    stem = f"pairwise_{args.kind}_{args.i}_{args.j}"
    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["iteration", "lower", "upper"]
        if baseline is not None:
            header.append("cg_estimate")
        writer.writerow(header)
        for idx, (it, lo, hi) in enumerate(trace.iterations):
            row = [it, repr(lo * report_scale), repr(hi * report_scale)]
            if baseline is not None:
                row.append(repr(baseline.estimates[idx]) if idx < len(baseline.estimates) else "")
            writer.writerow(row)

    payload = trace.as_dict()
    payload["external_i"] = args.i
    payload["external_j"] = args.j
    if baseline is not None:
        payload["baseline"] = {
            "estimate": baseline.estimate,
            "matvecs": baseline.matvecs,
            "iterations": baseline.iterations,
            "converged": baseline.converged,
            "performance_ratio": performance_ratio(max(baseline.matvecs, 1), trace.matvecs),
        }
    _dump_json(payload, out / f"{stem}.json")
    return 0


def _column_report(graph: Graph, kind: str, source: int, approx_scores: np.ndarray,
                   k_values: list[int], alpha: float | None) -> dict:
    """Precision and rank-correlation of the approximate column against the
    dense oracle, for every requested k.  Desk scale only."""
    refs = dense_reference_matrices(graph, alpha)
    if kind == "katz":
        exact = refs.katz[:, source]
        direction = "largest"
    else:
        exact = refs.commute[:, source]
        direction = "smallest"
    report = {"k_values": [], "oracle": "dense"}
    for k in k_values:
        if k >= graph.n:
            continue
        exact_top = TopKSet.from_scores(exact, k, direction, exclude=source)
        approx_top = TopKSet.from_scores(approx_scores, k, direction, exclude=source)
        tau_value = kendall_tau_on_exact_topk(
            approx_scores[exact_top.vertices], exact_top.scores
        )
        report["k_values"].append({
            "k": k,
            "precision": precision_at_k(approx_top, exact_top),
            "kendall_tau": None if np.isnan(tau_value) else tau_value,
        })
    return report


def cmd_column(args) -> int:
    graph = _load(args)
    out = _out_dir(args)
    map_path = _write_vertex_map(graph, out)
    source = _resolve_vertex(graph, args.i, map_path)
    k_values = [int(tok) for tok in args.k.split(",") if tok.strip()]
    stem = f"column_{args.kind}_{args.i}"
    payload: dict = {"kind": args.kind, "external_i": args.i, "source": source}

    if args.kind == "katz":
        alpha, sigma = _resolve_alpha_sigma(args, graph)
        column = katz_column_push(graph, alpha, source, tau=args.tau,
                                  scaling=args.scaling, max_pushes=args.max_pushes,
                                  sigma_max=sigma)
        column.to_csv(out / f"{stem}.csv")
        payload.update({
            "alpha": alpha,
            "converged": column.converged,
            "residual_one_norm": column.residual_one_norm,
            "stats": vars(column.stats),
        })
        approx = column.to_dense(graph.n)
    else:
        alpha = None
        column = commute_column(graph, source, tol=args.tau if args.tau else 1e-16,
                                max_iter=args.max_iter)
        column.to_csv(out / f"{stem}.csv")
        payload.update({
            "iterations": column.iterations,
            "residual_norm": column.residual_norm,
            "converged": column.converged,
        })
        approx = column.scores

    if graph.n <= DENSE_CUTOFF:
        payload["report"] = _column_report(graph, args.kind, source, approx,
                                           k_values, alpha)
    _dump_json(payload, out / f"{stem}_report.json")
    return 0


def _percentiles(values: list[float]) -> dict:
    """Nearest-rank 25/50/75th percentiles."""
    if not values:
        return {"p25": None, "p50": None, "p75": None}
    ranked = sorted(values)
    n = len(ranked)
    pick = lambda p: ranked[max(0, int(np.ceil(p / 100.0 * n)) - 1)]
    return {"p25": pick(25), "p50": pick(50), "p75": pick(75)}


def _bench_pairwise(args, graph: Graph, out: Path) -> None:
    alpha = _resolve_alpha(args, graph) if args.kind == "katz" else None
    pairs = sample_vertex_pairs(graph, args.scheme, count=args.count,
                                seed=args.seed, variant=args.kind)
    rows = []
    for i, j in pairs:
        t0 = time.perf_counter()
        if args.kind == "commute":
            trace = commute_pairwise_bounds(graph, i, j, lambda_lo=args.lambda_lo,
                                            lambda_hi=args.lambda_hi, tau=args.tau,
                                            max_iter=args.max_iter)
        else:
            trace = katz_pairwise_bounds(graph, alpha, i, j, lambda_lo=args.lambda_lo,
                                         lambda_hi=args.lambda_hi, tau=args.tau,
                                         max_iter=args.max_iter)
        t1 = time.perf_counter()
        baseline = cg_pairwise_baseline(graph, args.kind, i, j, alpha=alpha,
                                        tol=args.tau, max_iter=args.max_iter)
        t2 = time.perf_counter()
        rows.append({
            "i": int(graph.original_ids[i]),
            "j": int(graph.original_ids[j]),
            "iterations": len(trace.iterations),
            "matvecs": trace.matvecs,
            "converged": trace.converged,
            "lower": trace.final_lower,
            "upper": trace.final_upper,
            "cg_matvecs": baseline.matvecs,
            "cg_converged": baseline.converged,
            "cg_estimate": baseline.estimate,
            "performance_ratio": performance_ratio(max(baseline.matvecs, 1), trace.matvecs),
            "wall_time_s": t1 - t0,
            "cg_wall_time_s": t2 - t1,
        })
    stem = f"bench_pairwise_{args.kind}"
    _write_rows(out / f"{stem}.csv", rows)
    summary = {
        "suite": "pairwise",
        "kind": args.kind,
        "queries": len(rows),
        "alpha": alpha,
        "wall_time_s": _percentiles([r["wall_time_s"] for r in rows]),
        "cg_wall_time_s": _percentiles([r["cg_wall_time_s"] for r in rows]),
        "performance_ratio": _percentiles([r["performance_ratio"] for r in rows]),
    }
    _dump_json(summary, out / f"{stem}_summary.json")


def _bench_column(args, graph: Graph, out: Path) -> None:
    alpha, sigma = (_resolve_alpha_sigma(args, graph) if args.kind == "katz"
                    else (None, None))
    vertices = sample_vertices(graph, args.scheme, count=args.count,
                               seed=args.seed, variant=args.kind)
    k_values = [10, 25, 100, 1000]
    oracle_ok = graph.n <= DENSE_CUTOFF
    rows = []
    for v in vertices:
        t0 = time.perf_counter()
        if args.kind == "katz":
            column = katz_column_push(graph, alpha, v, tau=args.tau,
                                      scaling=args.scaling, max_pushes=args.max_pushes,
                                      sigma_max=sigma)
            approx = column.to_dense(graph.n)
            work = column.stats.effective_matvecs
        else:
            column = commute_column(graph, v, tol=args.tau if args.tau else 1e-16,
                                    max_iter=args.max_iter)
            approx = column.scores
            work = column.iterations
        t1 = time.perf_counter()
        row = {
            "vertex": int(graph.original_ids[v]),
            "degree": int(graph.degrees[v]),
            "work": work,
            "wall_time_s": t1 - t0,
        }
        if oracle_ok:
            report = _column_report(graph, args.kind, v, approx, k_values, alpha)
            for entry in report["k_values"]:
                row[f"precision_at_{entry['k']}"] = entry["precision"]
                row[f"kendall_tau_{entry['k']}"] = entry["kendall_tau"]
            if args.kind == "commute":
                heur = inverse_degree_heuristic(graph, v)
                refs = dense_reference_matrices(graph, None)
                for k in k_values:
                    if k >= graph.n:
                        continue
                    exact_top = TopKSet.from_scores(refs.commute[:, v], k,
                                                    "smallest", exclude=v)
                    heur_top = TopKSet.from_scores(heur, k, "smallest", exclude=v)
                    row[f"invdeg_precision_at_{k}"] = precision_at_k(heur_top, exact_top)
        rows.append(row)
    stem = f"bench_column_{args.kind}"
    _write_rows(out / f"{stem}.csv", rows)
    summary = {
        "suite": "column",
        "kind": args.kind,
        "queries": len(rows),
        "alpha": alpha,
        "wall_time_s": _percentiles([r["wall_time_s"] for r in rows]),
    }
    _dump_json(summary, out / f"{stem}_summary.json")


def _bench_localization(args, graph: Graph, out: Path) -> None:
    alpha, sigma = _resolve_alpha_sigma(args, graph)
    random_cols = sample_vertices(graph, "random", count=args.count or 25,
                                  seed=args.seed, variant="katz")
    degree_cols = sample_vertices(graph, "degree_correlated", variant="katz")
    columns = list(dict.fromkeys(random_cols + degree_cols))
    report = participation_trace(graph, alpha, columns, tau=args.tau,
                                 scaling=args.scaling, max_pushes=args.max_pushes,
                                 sigma_max=sigma)
    rows = [
        {"column": int(graph.original_ids[c]), "participation_ratio": float(r)}
        for c, r in zip(report.columns, report.ratios)
    ]
    _write_rows(out / "bench_localization.csv", rows)
    summary = {"suite": "localization", "alpha": alpha, "n": graph.n,
               "columns": len(columns), **report.summary()}
    _dump_json(summary, out / "bench_localization_summary.json")


def _write_rows(path: Path, rows: list[dict]) -> None:
    if not rows:
        path.write_text("")
        return
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v)
                             for k, v in row.items()})


def cmd_bench(args) -> int:
    graph = _load(args)
    out = _out_dir(args)
    _write_vertex_map(graph, out)
    if args.suite == "pairwise":
        _bench_pairwise(args, graph, out)
    elif args.suite == "column":
        _bench_column(args, graph, out)
    else:
        _bench_localization(args, graph, out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "stats": cmd_stats,
        "pairwise": cmd_pairwise,
        "column": cmd_column,
        "bench": cmd_bench,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
