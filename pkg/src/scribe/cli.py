"""Command line: initialize endpoints, build indexes, query, serve, bench.

Log level comes from the SCRIBE_LOG environment variable (default INFO).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import ScribeError


def _endpoint_from_arg(value: str, endpoint_id=None, timeout_ms=30_000):
    from .rdf import Endpoint, Local, Remote, load_ntriples

    if value.startswith(("http://", "https://")):
        return Endpoint(endpoint_id or value, Remote(value), timeout_ms=timeout_ms)
    path = Path(value)
    if not path.is_file():
        raise ScribeError(f"endpoint must be a URL or an N-Triples file: {value}")
    return Endpoint(endpoint_id or path.stem, Local(load_ntriples(path)),
                    timeout_ms=timeout_ms)


def cmd_init(args) -> int:
    from .initializer import InitConfig, initialize

    endpoint = _endpoint_from_arg(args.endpoint, timeout_ms=args.timeout_ms)
    config = InitConfig(
        max_literal_length=args.max_length,
        language=args.lang,
        query_budget=args.budget,
        page_size=args.page_size,
        significant_literal_count=args.k,
        warehouse_mode=args.warehouse,
    )
    snapshot = initialize(endpoint, config, snapshot_path=args.out)
    print(f"wrote {args.out}: {len(snapshot.predicates)} predicates, "
          f"{len(snapshot.literals)} literals, "
          f"{snapshot.stats.queries_issued} queries "
          f"({snapshot.stats.queries_timed_out} timed out)")
    return 0


def cmd_index(args) -> int:
    from .initializer import load_snapshot
    from .literal_index import build_index, save_index

    snapshot = load_snapshot(args.snapshot)
    index = build_index(snapshot, k=args.k)
    save_index(index, args.out)
    print(f"wrote {args.out}: {len(index.tree_entries)} tree strings, "
          f"{index.bins.total_count} residual literals in "
          f"{len(index.bins.keys())} bins")
    return 0


def _deps_for_endpoint(endpoint, registry, snapshot=None, lexicon_path=None):
    from .initializer import InitConfig, initialize
    from .literal_index import build_index
    from .similarity import Lexicon
    from .suggestions import QsmDeps

    if snapshot is None:
        snapshot = initialize(endpoint, InitConfig())
    index = build_index(snapshot, k=max(len(snapshot.literals), 1))
    lexicon = (Lexicon.from_file(lexicon_path) if lexicon_path
               else Lexicon.bundled())
    deps = QsmDeps(predicates=[uri for uri, _ in snapshot.predicates],
                   index=index, registry=registry, lexicon=lexicon)
    return deps, snapshot


def cmd_query(args) -> int:
    from .federation import Registry, execute_federated
    from .initializer import load_snapshot
    from .rdf import parse, serialize
    from .relaxation import relax_structure
    from .service import result_to_dict
    from .suggestions import suggest_term_queries

    text = args.query or Path(args.file).read_text(encoding="utf-8")
    query = parse(text)
    registry = Registry()
    endpoints = [_endpoint_from_arg(e, timeout_ms=args.timeout_ms)
                 for e in args.endpoint]
    for endpoint in endpoints:
        registry.register(endpoint)
    result = execute_federated(registry, query, timeout_ms=args.timeout_ms)
    print(json.dumps(result_to_dict(result), ensure_ascii=False, indent=2))

    if not (args.suggest or args.trace_relaxation):
        return 0
    snapshot = load_snapshot(args.snapshot) if args.snapshot else None
    deps, _ = _deps_for_endpoint(endpoints[0], registry, snapshot,
                                 args.lexicon)
    suggestions = suggest_term_queries(query, deps)
    relaxed, trace = relax_structure(query, deps, endpoints[0])
    suggestions.extend(relaxed)
    for i, suggestion in enumerate(suggestions):
        print(f"-- suggestion {i}: {suggestion.answer_count} answers",
              file=sys.stderr)
        print(serialize(suggestion.query), file=sys.stderr)
    if args.trace_relaxation:
        Path(args.trace_relaxation).write_text(trace.to_json(),
                                               encoding="utf-8")
        print(f"relaxation trace written to {args.trace_relaxation}",
              file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from .service import QueryService, ServiceConfig, ServiceServer

    ui_dir = None
    if args.ui:
        ui_dir = Path(args.ui_dir)
        if not (ui_dir / "index.html").is_file():
            print(f"warning: no index.html under {ui_dir}", file=sys.stderr)
    config = ServiceConfig(
        snapshot_dir=Path(args.snapshot_dir) if args.snapshot_dir else None,
        processes=args.processes,
        ui_dir=ui_dir,
    )
    if config.snapshot_dir:
        config.snapshot_dir.mkdir(parents=True, exist_ok=True)
    server = ServiceServer(QueryService(config), port=args.port,
                           host=args.host)
    print(f"scribe service on {server.url}")
    server.serve_forever()
    return 0


def cmd_bench(args) -> int:
    from .bench import run_hit_ratio, run_qsm_breakdown, run_scan_scaling

    out = Path(args.out)
    if args.what == "hit-ratio":
        rows = run_hit_ratio(out, seed=args.seed, literal_count=args.literals)
        for k, ratio in rows:
            print(f"k={k}: hit ratio {ratio:.3f}")
    elif args.what == "scan-scaling":
        rows = run_scan_scaling(out, seed=args.seed,
                                literal_count=args.literals,
                                processes=tuple(args.processes))
        for p, latency, ideal in rows:
            print(f"P={p}: {latency * 1000:.2f} ms "
                  f"(ideal {ideal * 1000:.2f} ms)")
    else:
        from .federation import Registry
        from .fixtures import NS, fixture_path
        from .rdf import parse

        registry = Registry()
        endpoint = _endpoint_from_arg(str(fixture_path("kennedy")))
        registry.register(endpoint)
        deps, _ = _deps_for_endpoint(endpoint, registry)
        queries = [
            parse('SELECT ?p WHERE { ?p <%ssurname> "Kennedys" }' % NS),
            parse('SELECT ?p ?n WHERE { ?p <%ssurname> "Kennedy"@en . '
                  "?p <%sname> ?n }" % (NS, NS)),
        ]
        rows = run_qsm_breakdown(out, queries, deps, endpoint)
        for row in rows:
            print(row)
    print(f"artifacts under {out}/")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scribe",
        description="Interactive SPARQL query assistance engine")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="bootstrap an endpoint into a snapshot")
    p.add_argument("--endpoint", required=True,
                   help="SPARQL endpoint URL or N-Triples file")
    p.add_argument("--max-length", type=int, default=80)
    p.add_argument("--lang", default="en")
    p.add_argument("--budget", type=int, default=None,
                   help="total query budget for initialization")
    p.add_argument("--page-size", type=int, default=10_000)
    p.add_argument("--k", type=int, default=40_000,
                   help="significant literal count for later indexing")
    p.add_argument("--warehouse", action="store_true",
                   help="single-pass harvest for local warehouses")
    p.add_argument("--timeout-ms", type=int, default=30_000)
    p.add_argument("--out", required=True, help="snapshot file (JSON lines)")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("index", help="build the literal index from a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--k", type=int, default=40_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="execute a query against endpoints")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--file", help="file holding the query text")
    source.add_argument("--query", help="query text inline")
    p.add_argument("--endpoint", action="append", required=True,
                   help="endpoint URL or N-Triples file (repeatable)")
    p.add_argument("--snapshot", help="snapshot to drive suggestions")
    p.add_argument("--lexicon", help="verbalization lexicon JSON")
    p.add_argument("--suggest", action="store_true",
                   help="also print suggested alternative queries")
    p.add_argument("--trace-relaxation", metavar="PATH",
                   help="dump relaxation expansion order and budget use")
    p.add_argument("--timeout-ms", type=int, default=30_000)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--snapshot-dir", default=None)
    p.add_argument("--processes", type=int, default=None,
                   help="bin-scan worker processes (default: cpu count)")
    p.add_argument("--ui", action="store_true", help="serve the web UI")
    p.add_argument("--ui-dir", default="frontend/dist")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="desk-scale performance sweeps")
    p.add_argument("what", choices=["hit-ratio", "scan-scaling", "qsm"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--literals", type=int, default=50_000)
    p.add_argument("--processes", type=int, nargs="+", default=[1, 2, 4, 8])
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("SCRIBE_LOG", "INFO").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScribeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
