"""Desk-scale performance harness.

Reproduces the structure of three measurements: suffix-tree hit ratio as
the number of indexed literals grows, residual-bin scan latency as the
worker count grows, and a per-task wall-time breakdown of the suggestion
pipeline. Each sweep writes a CSV and an SVG plot.

The workload replays the literal terms of the study question set typed
character by character; the data is a synthetic snapshot generated
deterministically from a seed.
"""
from __future__ import annotations

import csv
import random
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .completion import DEFAULT_GAMMA, ScanPool
from .federation import prefetch
from .initializer import CacheSnapshot, ClassHierarchy, InitStats
from .literal_index import LiteralIndex, build_index
from .relaxation import plan_relaxation, tree_to_query
from .rdf import Endpoint, Literal, serialize
from .suggestions import (
    QsmDeps,
    find_literal_alternatives,
    find_predicate_alternatives,
)

# literal terms appearing in the study questions, typed character by character
WORKLOAD_TERMS = [
    "Ganges", "John F. Kennedy", "Salt Lake City", "Tom Hanks",
    "Margaret Thatcher", "Czech Republic", "Brooklyn Bridge",
    "Abraham Lincoln", "Wikipedia", "Lake Placid", "Cat Stevens",
    "Juan Carlos I", "Fort Knox", "Frank The Tank", "Charmed",
    "Limerick Lake", "Robert F. Kennedy", "Australia", "William Goldman",
    "Jack Kerouac", "Viking Press", "Steven Spielberg", "Clint Eastwood",
    "1945", "aerospace", "medicine", "Canada",
]

_FILLER_WORDS = (
    "north south east west upper lower new old great little saint royal "
    "river lake mount fort port villa santa grand strand bridge tower "
    "memorial national county district city town village park square "
    "street avenue museum library university college school theatre "
    "gallery station terminal harbour light house palace castle abbey "
    "cathedral garden island valley ridge creek falls spring grove field "
    "meadow hill brook glen cliff shore bay cape point head landing"
).split()

_PREDICATES = [
    ("name", 9000), ("label", 7000), ("title", 5000), ("surname", 3000),
    ("birthPlace", 2500), ("locatedIn", 2000), ("country", 1800),
    ("population", 1500), ("writer", 1200), ("publisher", 1000),
    ("director", 900), ("starring", 800), ("spouse", 700), ("capital", 600),
    ("timeZone", 500), ("currency", 400), ("creator", 300), ("depth", 200),
    ("instrument", 100), ("budget", 50),
]


def keystroke_workload(terms: Sequence[str] = WORKLOAD_TERMS,
                       min_length: int = 2) -> list[str]:
    """Every prefix of every term, as typed one character at a time."""
    out = []
    for term in terms:
        for end in range(min_length, len(term) + 1):
            out.append(term[:end])
    return out


def synthetic_snapshot(seed: int = 7, literal_count: int = 50_000
                       ) -> CacheSnapshot:
    """Deterministic snapshot whose literals embed the workload terms."""
    rng = random.Random(seed)
    literals: list[tuple[str, int]] = []
    seen: set[str] = set()

    def admit(lexical: str) -> None:
        if lexical not in seen and 0 < len(lexical) < 80:
            seen.add(lexical)
            significance = int(rng.expovariate(1 / 40))
            literals.append((lexical, significance))

    for term in WORKLOAD_TERMS:
        admit(term)
    while len(literals) < literal_count:
        shape = rng.random()
        if shape < 0.12:
            term = rng.choice(WORKLOAD_TERMS)
            admit(f"{rng.choice(_FILLER_WORDS).title()} {term}")
        elif shape < 0.2:
            term = rng.choice(WORKLOAD_TERMS)
            admit(f"{term} {rng.choice(_FILLER_WORDS)}")
        else:
            words = [rng.choice(_FILLER_WORDS)
                     for _ in range(rng.randrange(1, 5))]
            if rng.random() < 0.5:
                words[0] = words[0].title()
            admit(" ".join(words) + (f" {rng.randrange(1, 2000)}"
                                     if rng.random() < 0.3 else ""))
    base = "http://bench.example.org/ns/"
    return CacheSnapshot(
        endpoint_id=f"synthetic-{seed}",
        predicates=[(base + name, freq) for name, freq in _PREDICATES],
        literals=sorted(literals, key=lambda pair: (-pair[1], pair[0])),
        hierarchy=ClassHierarchy(),
        language="en",
        max_literal_length=80,
        stats=InitStats(literal_count=len(literals)),
    )


# --- sweeps -----------------------------------------------------------------

def hit_ratio_sweep(snapshot: CacheSnapshot, counts: Sequence[int],
                    workload: Optional[Sequence[str]] = None
                    ) -> list[tuple[int, float]]:
    """Fraction of workload terms with at least one suffix-tree match."""
    workload = list(workload or keystroke_workload())
    rows = []
    for k in counts:
        index = build_index(snapshot, k=k)
        hits = sum(1 for term in workload if index.tree_lookup(term))
        rows.append((k, hits / len(workload) if workload else 0.0))
    return rows


def scan_scaling_sweep(index: LiteralIndex,
                       workload: Optional[Sequence[str]] = None,
                       processes: Sequence[int] = (1, 2, 4, 8),
                       repeats: int = 3) -> list[tuple[int, float, float]]:
    """Mean residual-scan latency per worker count, with the ideal curve."""
    workload = list(workload or WORKLOAD_TERMS)
    means: dict[int, float] = {}
    for p in processes:
        with ScanPool(index, processes=p) as pool:
            # warm-up round so fork/pipe setup is not measured
            pool.substring_scan(workload[0],
                                len(workload[0]), len(workload[0]) + DEFAULT_GAMMA)
            samples = []
            for _ in range(repeats):
                for term in workload:
                    start = time.perf_counter()
                    pool.substring_scan(term, len(term),
                                        len(term) + DEFAULT_GAMMA)
                    samples.append(time.perf_counter() - start)
        means[p] = statistics.mean(samples)
    baseline = means[min(means)]
    smallest = min(means)
    return [(p, means[p], baseline * smallest / p) for p in processes]


def qsm_timing_breakdown(queries: Sequence, deps: QsmDeps, endpoint: Endpoint
                         ) -> list[dict]:
    """Wall time per suggestion task for each fixture query."""
    rows = []
    for i, query in enumerate(queries):
        timings = {"query": i}

        start = time.perf_counter()
        for pattern in query.patterns:
            predicate = pattern.predicate
            if hasattr(predicate, "value"):
                find_predicate_alternatives(predicate, deps.predicates,
                                            deps.lexicon, deps.jw)
        timings["predicate_alternatives_ms"] = _ms_since(start)

        start = time.perf_counter()
        for pattern in query.patterns:
            if isinstance(pattern.object, Literal):
                find_literal_alternatives(pattern.object, deps.index,
                                          deps.window, deps.jw, deps.pool)
        timings["literal_alternatives_ms"] = _ms_since(start)

        start = time.perf_counter()
        plan = plan_relaxation(query, deps, endpoint)
        timings["relaxation_ms"] = _ms_since(start)

        start = time.perf_counter()
        candidates = [tree_to_query(t, query, plan.groups,
                                    plan.predicate_alternatives)
                      for t in plan.trees]
        from .suggestions import _gather_candidates
        predicate_swaps, literal_swaps = _gather_candidates(query, deps)
        candidates += [c.query for c in predicate_swaps[: deps.candidate_cap]]
        candidates += [c.query for c in literal_swaps[: deps.candidate_cap]]
        prefetch(deps.registry, candidates, endpoint_ids=deps.endpoint_ids,
                 fan_out=deps.fan_out, execute=deps.execute)
        timings["candidate_execution_ms"] = _ms_since(start)
        rows.append(timings)
    return rows


def _ms_since(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


# --- output ------------------------------------------------------------------

def write_csv(path: Union[str, Path], header: Sequence[str],
              rows: Sequence[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def plot_lines(path: Union[str, Path], title: str, xlabel: str, ylabel: str,
               series: dict[str, list[tuple]]) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.2))
    for label, points in series.items():
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)


def run_hit_ratio(out_dir: Union[str, Path], seed: int = 7,
                  literal_count: int = 50_000,
                  counts: Sequence[int] = (0, 500, 2000, 5000, 10_000, 20_000)
                  ) -> list[tuple[int, float]]:
    snapshot = synthetic_snapshot(seed, literal_count)
    rows = hit_ratio_sweep(snapshot, counts)
    out = Path(out_dir)
    write_csv(out / "hit_ratio.csv", ["k", "hit_ratio"], rows)
    plot_lines(out / "hit_ratio.svg", "Suffix-tree hit ratio",
               "indexed literals", "hit ratio", {"hit ratio": rows})
    return rows


def run_scan_scaling(out_dir: Union[str, Path], seed: int = 7,
                     literal_count: int = 50_000,
                     processes: Sequence[int] = (1, 2, 4, 8)
                     ) -> list[tuple[int, float, float]]:
    snapshot = synthetic_snapshot(seed, literal_count)
    index = build_index(snapshot, k=0)
    rows = scan_scaling_sweep(index, processes=processes)
    out = Path(out_dir)
    write_csv(out / "scan_scaling.csv",
              ["processes", "mean_latency_s", "ideal_latency_s"], rows)
    plot_lines(out / "scan_scaling.svg", "Residual bin scan scaling",
               "workers", "latency (s)",
               {"measured": [(p, m) for p, m, _ in rows],
                "ideal": [(p, i) for p, _, i in rows]})
    return rows


def run_qsm_breakdown(out_dir: Union[str, Path], queries, deps: QsmDeps,
                      endpoint: Endpoint) -> list[dict]:
    rows = qsm_timing_breakdown(queries, deps, endpoint)
    header = ["query", "predicate_alternatives_ms", "literal_alternatives_ms",
              "relaxation_ms", "candidate_execution_ms"]
    out = Path(out_dir)
    write_csv(out / "qsm_breakdown.csv", header,
              [[row[h] for h in header] for row in rows])
    if rows:
        means = [(h, statistics.mean(r[h] for r in rows)) for h in header[1:]]
        plot_lines(out / "qsm_breakdown.svg", "Suggestion task wall time",
                   "task", "mean ms",
                   {"mean": [(i, m) for i, (_, m) in enumerate(means)]})
    return rows
