"""Command-line interface.

Subcommands: gen, build, query, bench, sweep, oracle, dump-index. Exit codes:
0 success, 1 usage error, 2 data error (unreadable/malformed inputs).
``KGP_THREADS`` caps benchmark parallelism; ``KGP_KERNEL`` picks the kernel
backend (c, py, auto).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench as bench_mod
from . import kernels
from . import patterns as pat
from .errors import KgPatternError, ParameterError
from .generator import GenConfig, generate_graph
from .graph import load_graph, tokenize
from .indexio import read_index, write_index
from .oracle import count_patterns_exhaustive, enumerate_patterns_exhaustive
from .pagerank import compute_pagerank
from .pathindex import build_index
from .scoring import DEFAULT_CONFIG, ScoringConfig
from .search import (
    Query,
    SamplingConfig,
    search_baseline,
    search_linear_enum,
    search_linear_topk,
    search_pattern_enum,
)
from .tables import render_table

USAGE_ERROR = 1
DATA_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgpattern", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic graph file")
    p_gen.add_argument("--entities", type=int, default=100)
    p_gen.add_argument("--types", type=int, default=8)
    p_gen.add_argument("--attrs", type=int, default=10)
    p_gen.add_argument("--avg-degree", type=float, default=2.0)
    p_gen.add_argument("--vocab", type=int, default=50)
    p_gen.add_argument("--words-per-text", type=int, default=3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)

    p_build = sub.add_parser("build", help="build and serialize a path index")
    p_build.add_argument("--graph", required=True)
    p_build.add_argument("--index", required=True, help="output index file")
    p_build.add_argument("--d", type=int, default=3, help="height threshold")
    p_build.add_argument("--damping", type=float, default=0.85)
    p_build.add_argument("--tol", type=float, default=1e-8)

    p_query = sub.add_parser("query", help="run a keyword query")
    p_query.add_argument("--graph", required=True)
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--q", required=True, help="keywords, e.g. \"database software\"")
    p_query.add_argument("--k", type=int, default=10)
    p_query.add_argument(
        "--algo",
        choices=["baseline", "pattern-enum", "linear", "linear-topk"],
        default="linear-topk",
    )
    p_query.add_argument("--lambda", dest="threshold", default="inf",
                         help="sampling threshold (number or 'inf')")
    p_query.add_argument("--rho", type=float, default=1.0, help="sampling rate in (0,1]")
    p_query.add_argument("--seed", type=int, default=0)
    p_query.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p_query.add_argument("--out")
    p_query.add_argument("--config", help="JSON file with scoring config (z1, z2, z3, aggregator)")

    p_bench = sub.add_parser("bench", help="time engines over a query workload")
    p_bench.add_argument("--graph", required=True)
    p_bench.add_argument("--index", required=True)
    p_bench.add_argument("--queries", required=True, help="file with one query per line")
    p_bench.add_argument("--k", type=int, default=10)
    p_bench.add_argument("--algos", default=",".join(bench_mod.ALGORITHMS))
    p_bench.add_argument("--lambda", dest="threshold", default="inf")
    p_bench.add_argument("--rho", type=float, default=1.0)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--parallel", action="store_true")
    p_bench.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p_bench.add_argument("--out")

    p_sweep = sub.add_parser("sweep", help="precision sweep over sampling parameters")
    p_sweep.add_argument("--graph", required=True)
    p_sweep.add_argument("--index", required=True)
    p_sweep.add_argument("--queries", required=True)
    p_sweep.add_argument("--k", type=int, default=10)
    p_sweep.add_argument("--lambdas", default="0", help="comma list, 'inf' allowed")
    p_sweep.add_argument("--rhos", default="0.1,0.5,1.0")
    p_sweep.add_argument("--seeds", type=int, default=5, help="number of seeds per point")
    p_sweep.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p_sweep.add_argument("--out")

    p_oracle = sub.add_parser("oracle", help="brute-force pattern list/count (small graphs)")
    p_oracle.add_argument("--graph", required=True)
    p_oracle.add_argument("--q", required=True)
    p_oracle.add_argument("--d", type=int, default=3)
    p_oracle.add_argument("--count", action="store_true", help="print only the pattern count")
    p_oracle.add_argument("--format", choices=["text", "json"], default="text")
    p_oracle.add_argument("--out")

    p_dump = sub.add_parser("dump-index", help="JSON debug dump of an index file")
    p_dump.add_argument("--index", required=True)
    p_dump.add_argument("--out")

    return parser


def _emit(text: str, out_path) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _parse_threshold(raw: str) -> float:
    if raw.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(raw)
    except ValueError:
        raise ParameterError(f"--lambda must be a number or 'inf', got {raw!r}") from None


def _scoring_from(path) -> ScoringConfig:
    if not path:
        return DEFAULT_CONFIG
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ScoringConfig(
        z1=data.get("z1", -1.0),
        z2=data.get("z2", 1.0),
        z3=data.get("z3", 1.0),
        aggregator=data.get("aggregator", "sum"),
    )


def _pattern_json(graph, sp, include_table=True) -> dict:
    entry = {
        "pattern": pat.tree_pattern_names(graph, sp.pattern),
        "score": sp.score,
        "estimated_score": sp.estimated_score,
        "count": sp.subtree_count,
    }
    if include_table:
        table = render_table(graph, sp.pattern, sp.subtrees)
        entry["columns"] = table.column_names
        entry["rows"] = table.rows
    return entry


def _cmd_gen(args) -> int:
    cfg = GenConfig(
        entities=args.entities,
        types=args.types,
        attr_types=args.attrs,
        avg_out_degree=args.avg_degree,
        vocab=args.vocab,
        words_per_text=args.words_per_text,
        seed=args.seed,
    )
    Path(args.out).write_text(generate_graph(cfg), encoding="utf-8")
    return 0


def _cmd_build(args) -> int:
    graph = load_graph(args.graph)
    pr = compute_pagerank(graph, damping=args.damping, tolerance=args.tol)
    idx = build_index(graph, pr, args.d)
    write_index(idx, args.index)
    print(
        f"indexed {idx.stats.entry_count} entries over {len(idx.words)} words "
        f"(d={args.d}, cost proxy {idx.stats.cost_proxy}, kernel backend {kernels.backend_name()})"
    )
    return 0


def _run_query(graph, idx, args, scoring):
    query = Query(tuple(tokenize(args.q)), args.k)
    sampling = SamplingConfig(_parse_threshold(args.threshold), args.rho, args.seed)
    if args.algo == "baseline":
        return query, search_baseline(graph, idx, query, scoring).patterns
    if args.algo == "pattern-enum":
        return query, search_pattern_enum(graph, idx, query, scoring).patterns
    if args.algo == "linear":
        ranked = bench_mod.rank_enumeration(search_linear_enum(graph, idx, query), scoring)
        return query, ranked[: query.k]
    return query, search_linear_topk(graph, idx, query, sampling, scoring).patterns


def _cmd_query(args) -> int:
    graph = load_graph(args.graph)
    idx = read_index(args.index)
    scoring = _scoring_from(args.config)
    query, ranked = _run_query(graph, idx, args, scoring)
    if args.format == "json":
        doc = {
            "query": list(query.keywords),
            "k": query.k,
            "algorithm": args.algo,
            "params": {"lambda": args.threshold, "rho": args.rho, "seed": args.seed},
            "patterns": [_pattern_json(graph, sp) for sp in ranked],
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    elif args.format == "csv":
        if not ranked:
            _emit("", args.out)
        else:
            top = ranked[0]
            _emit(render_table(graph, top.pattern, top.subtrees).to_csv(), args.out)
    else:
        chunks = []
        for rank, sp in enumerate(ranked, start=1):
            table = render_table(graph, sp.pattern, sp.subtrees)
            header = f"#{rank} score={sp.score:.6g} subtrees={sp.subtree_count}"
            chunks.append(header + "\n" + " | ".join(pat.tree_pattern_names(graph, sp.pattern)))
            chunks.append(table.to_text())
        _emit("\n\n".join(chunks) if chunks else "(no matching tree patterns)", args.out)
    return 0


def _read_queries(path, k) -> list[Query]:
    queries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            queries.append(Query(tuple(tokenize(line)), k))
    return queries


def _emit_report(report, fmt, out) -> None:
    if fmt == "json":
        _emit(json.dumps(report.to_json_dict(), indent=2) + "\n", out)
    elif fmt == "csv":
        _emit("\n".join(",".join(str(c) for c in row) for row in report.to_csv_rows()) + "\n", out)
    else:
        lines = []
        for t in report.timings:
            lines.append(
                f"{t.algorithm:12s} {t.seconds * 1e3:9.3f} ms  subtrees={t.subtree_total:<8d} "
                f"patterns={t.pattern_total:<6d} {t.query}"
            )
        for b in report.by_subtrees:
            lines.append(
                f"bucket[subtrees<={b.bucket}] {b.algorithm:12s} n={b.count} "
                f"min={b.min_seconds * 1e3:.3f}ms geomean={b.geomean_seconds * 1e3:.3f}ms max={b.max_seconds * 1e3:.3f}ms"
            )
        for p in report.precisions:
            lines.append(
                f"precision lambda={p.threshold} rho={p.rate} seed={p.seed} "
                f"{p.precision:.3f}  {p.query}"
            )
        _emit("\n".join(lines) + "\n", out)


def _cmd_bench(args) -> int:
    graph = load_graph(args.graph)
    idx = read_index(args.index)
    queries = _read_queries(args.queries, args.k)
    sampling = SamplingConfig(_parse_threshold(args.threshold), args.rho, args.seed)
    report = bench_mod.run_bench(
        graph,
        idx,
        queries,
        algorithms=tuple(a.strip() for a in args.algos.split(",") if a.strip()),
        sampling=sampling,
        parallel=args.parallel,
    )
    _emit_report(report, args.format, args.out)
    return 0


def _cmd_sweep(args) -> int:
    graph = load_graph(args.graph)
    idx = read_index(args.index)
    queries = _read_queries(args.queries, args.k)
    thresholds = [_parse_threshold(x) for x in args.lambdas.split(",") if x.strip()]
    rates = [float(x) for x in args.rhos.split(",") if x.strip()]
    report = bench_mod.run_precision_sweep(
        graph, idx, queries, thresholds, rates, args.k, seeds=range(args.seeds)
    )
    _emit_report(report, args.format, args.out)
    return 0


def _cmd_oracle(args) -> int:
    graph = load_graph(args.graph)
    words = tokenize(args.q)
    if not words:
        print("error: empty query", file=sys.stderr)
        return USAGE_ERROR
    if args.count:
        _emit(str(count_patterns_exhaustive(graph, words, args.d)), args.out)
        return 0
    found = enumerate_patterns_exhaustive(graph, words, args.d)
    if args.format == "json":
        doc = [
            {"pattern": pat.tree_pattern_names(graph, p), "subtrees": len(members)}
            for p, members in sorted(found.items(), key=lambda kv: pat.tree_sort_key(kv[0]))
        ]
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        lines = [
            f"{len(members):6d}  {' | '.join(pat.tree_pattern_names(graph, p))}"
            for p, members in sorted(found.items(), key=lambda kv: pat.tree_sort_key(kv[0]))
        ]
        _emit("\n".join(lines) if lines else "(no patterns)", args.out)
    return 0


def _cmd_dump_index(args) -> int:
    idx = read_index(args.index)

    def pattern_names(p):
        parts = []
        for i, el in enumerate(p):
            if i % 2 == 0:
                parts.append(idx.type_names[el] if el < len(idx.type_names) else str(el))
            else:
                parts.append(idx.attr_names[el] if el < len(idx.attr_names) else str(el))
        return ".".join(parts)

    doc = {
        "depth": idx.depth,
        "entities": idx.n_entities,
        "types": idx.n_types,
        "attrs": idx.n_attrs,
        "entry_count": idx.stats.entry_count,
        "cost_proxy": idx.stats.cost_proxy,
        "words": {
            w: {
                "entries": len(idx.words[w].records),
                "patterns": [pattern_names(p) for p in idx.patterns(w)],
                "roots": idx.roots(w),
            }
            for w in idx.vocabulary()
        },
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "build": _cmd_build,
    "query": _cmd_query,
    "bench": _cmd_bench,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
    "dump-index": _cmd_dump_index,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 on --help; remap usage to 1.
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except ParameterError as exc:  # bad flag values (rho, lambda, k, keywords)
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (KgPatternError, FileNotFoundError, PermissionError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
