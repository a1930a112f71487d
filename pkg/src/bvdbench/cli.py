"""Command-line entry points: simulate, graph-features, score, bench."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import anomaly as anomaly_mod
from . import bench as bench_mod
from .dataio import standardize_matrix
from .herdgraph import NeighborGraph, centralities, local_density
from .simgen import config_from_dict, panel_rows, simulate_panel

SIMULATE_HEADER = (
    "herd_id", "year", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "status",
)


def _cmd_simulate(args) -> int:
    with open(args.config) as fh:
        config = config_from_dict(json.load(fh))
    panel = simulate_panel(config)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SIMULATE_HEADER)
        for row in panel_rows(panel):
            writer.writerow(row)
    print(f"wrote {len(panel.records)} herd-year rows to {args.out}")
    return 0


def _read_edges(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"herd_a", "herd_b"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns herd_a, herd_b")
        return [(row["herd_a"], row["herd_b"]) for row in reader]


def _read_statuses(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"herd_id", "status"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns herd_id, status")
        ids, statuses = [], []
        for row in reader:
            ids.append(row["herd_id"])
            statuses.append(int(row["status"]))
        return ids, statuses


def _cmd_graph_features(args) -> int:
    edges = _read_edges(args.edges)
    ids, statuses = _read_statuses(args.statuses)
    graph = NeighborGraph.from_edges(ids, edges)
    cents = centralities(graph)
    density = local_density(graph, statuses)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["herd_id", "degree", "betweenness", "closeness", "local_density"])
        for i, herd in enumerate(ids):
            writer.writerow([
                herd,
                int(cents.degree[i]),
                repr(float(cents.betweenness[i])),
                repr(float(cents.closeness[i])),
                repr(float(density[i])),
            ])
    print(f"wrote graph features for {len(ids)} herds to {args.out}")
    return 0


def _cmd_score(args) -> int:
    with open(args.infile, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{args.infile}: empty file")
        if "herd_id" not in header:
            raise ValueError(f"{args.infile}: expected a herd_id column")
        id_pos = header.index("herd_id")
        feature_cols = [i for i, name in enumerate(header) if i != id_pos]
        ids, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            ids.append(row[id_pos])
            try:
                rows.append([float(row[i]) for i in feature_cols])
            except ValueError:
                raise ValueError(f"{args.infile}: row {lineno}: non-numeric feature value")
    X = standardize_matrix(np.array(rows))

    params = {}
    if args.detector in ("lof", "knn"):
        params["k"] = args.k
    detector = anomaly_mod.make_detector(args.detector, **params)
    detector.fit(X)
    scores = detector.score_train()
    threshold = anomaly_mod.threshold_from_scores(
        scores, "contamination_quantile", q=args.contamination
    )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["herd_id", "score", "flagged"])
        for herd, s in zip(ids, scores):
            writer.writerow([herd, repr(float(s)), int(s >= threshold)])
    print(f"scored {len(ids)} rows with {args.detector}; threshold {threshold:.6g}")
    return 0


def _cmd_bench(args) -> int:
    if args.config:
        with open(args.config) as fh:
            config = bench_mod.scenario_config_from_dict(json.load(fh))
    else:
        config = bench_mod.ScenarioConfig()
    workers = bench_mod.resolve_workers(args.workers)
    reports = bench_mod.run_scenarios(config, workers=workers)

    import os

    os.makedirs(args.out_dir, exist_ok=True)
    echo = bench_mod.config_echo_dict(config)
    paths = []
    formats = {"csv": "report.csv", "md": "report.md", "json": "report.json"}
    wanted = formats if args.format == "all" else {args.format: formats[args.format]}
    for fmt, fname in wanted.items():
        out = os.path.join(args.out_dir, fname)
        bench_mod.emit_report(reports, fmt, out, config_echo=echo)
        paths.append(out)
    failures = [r for r in reports if r.status.startswith("error")]
    for r in failures:
        print(f"cell failed: n={r.sample_size} rho={r.prevalence} "
              f"{r.strategy}/{r.model}: {r.status}", file=sys.stderr)
    print(f"wrote {', '.join(paths)} ({len(reports)} cells, {len(failures)} failed)")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvdbench",
        description="Imbalanced herd-disease classification toolkit and benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic herd panel CSV")
    p_sim.add_argument("--config", required=True, help="JSON simulation config")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.set_defaults(func=_cmd_simulate)

    p_graph = sub.add_parser("graph-features", help="network covariates from an edge list")
    p_graph.add_argument("--edges", required=True, help="CSV with columns herd_a, herd_b")
    p_graph.add_argument("--statuses", required=True, help="CSV with columns herd_id, status")
    p_graph.add_argument("--out", required=True)
    p_graph.set_defaults(func=_cmd_graph_features)

    p_score = sub.add_parser("score", help="anomaly-score rows of a feature CSV")
    p_score.add_argument("--detector", required=True, choices=anomaly_mod.DETECTOR_NAMES)
    p_score.add_argument("--in", dest="infile", required=True)
    p_score.add_argument("--out", required=True)
    p_score.add_argument("--k", type=int, default=20, help="neighbor count (lof/knn)")
    p_score.add_argument(
        "--contamination", type=float, default=0.05,
        help="expected outlier share for the flag threshold",
    )
    p_score.set_defaults(func=_cmd_score)

    p_bench = sub.add_parser("bench", help="run the scenario grid and emit reports")
    p_bench.add_argument("--config", help="JSON scenario config (defaults when omitted)")
    p_bench.add_argument("--out-dir", required=True)
    p_bench.add_argument("--format", choices=("csv", "md", "json", "all"), default="all")
    p_bench.add_argument("--workers", type=int, default=1,
                         help="worker threads (BVDBENCH_WORKERS overrides)")
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
