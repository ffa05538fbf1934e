"""One-time endpoint bootstrapping.

Retrieves predicates, the class hierarchy and filtered literals, scores
literal significance, and persists everything as a snapshot. Queries are
decomposed so each stays below remote timeout limits: descent through the
class hierarchy on timeout, LIMIT/OFFSET pagination otherwise, all under
an optional total query budget.
"""
from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from .errors import BudgetExhausted, EndpointError, InitFailure, QueryTimeout
from .rdf import Endpoint, Literal, ResultSet, Uri, execute_remote
from .rdf.terms import OWL_CLASS, RDF_TYPE, RDFS_SUBCLASSOF

log = logging.getLogger(__name__)

Executor = Callable[[Endpoint, str], ResultSet]


@dataclass
class InitConfig:
    max_literal_length: int = 80
    language: str = "en"
    query_budget: Optional[int] = None
    page_size: int = 10_000
    significant_literal_count: int = 40_000
    warehouse_mode: bool = False

    def __post_init__(self):
        if self.max_literal_length <= 0 or self.page_size <= 0:
            raise ValueError("max_literal_length and page_size must be positive")
        if self.significant_literal_count < 0:
            raise ValueError("significant_literal_count must be >= 0")


@dataclass
class ClassHierarchy:
    nodes: set[str] = field(default_factory=set)
    child_edges: dict[str, list[str]] = field(default_factory=dict)
    roots: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.nodes

    def children(self, parent: str) -> list[str]:
        return self.child_edges.get(parent, [])


@dataclass
class InitStats:
    queries_issued: int = 0
    queries_timed_out: int = 0
    literal_count: int = 0


@dataclass
class CacheSnapshot:
    endpoint_id: str
    predicates: list[tuple[str, int]]       # (uri, frequency), descending
    literals: list[tuple[str, int]]         # (lexical, significance >= 0)
    hierarchy: ClassHierarchy
    language: str
    max_literal_length: int
    stats: InitStats


class BudgetMeter:
    """Counts outbound initialization queries against an optional limit."""

    def __init__(self, limit: Optional[int] = None):
        if limit is not None and limit < 0:
            raise ValueError("budget limit must be >= 0")
        self.limit = limit
        self.used = 0

    @property
    def remaining(self) -> float:
        return math.inf if self.limit is None else self.limit - self.used

    @property
    def exhausted(self) -> bool:
        return self.remaining <= 0

    def charge(self) -> None:
        if self.exhausted:
            raise BudgetExhausted(f"query budget of {self.limit} used up")
        self.used += 1


@dataclass
class QueryRunner:
    """Binds an endpoint to an executor, metering every query issued."""

    endpoint: Endpoint
    execute: Executor = execute_remote
    meter: BudgetMeter = field(default_factory=BudgetMeter)
    stats: InitStats = field(default_factory=InitStats)

    def run(self, text: str) -> ResultSet:
        self.meter.charge()
        self.stats.queries_issued += 1
        try:
            return self.execute(self.endpoint, text)
        except QueryTimeout:
            self.stats.queries_timed_out += 1
            raise


# --- bootstrap query templates ----------------------------------------------

_FILTER_BODY = 'isliteral(?o) && lang(?o) = "{lang}" && strlen(str(?o)) < {max_len}'
_FILTER_NO_ISLIT = 'lang(?o) = "{lang}" && strlen(str(?o)) < {max_len}'


def _paged(text: str, limit: Optional[int], offset: Optional[int]) -> str:
    if limit is not None:
        text += f"\nLIMIT {limit}"
    if offset:
        text += f"\nOFFSET {offset}"
    return text


def predicate_frequency_query() -> str:
    return ("SELECT DISTINCT ?p (COUNT(*) AS ?frequency) WHERE {\n?s ?p ?o\n}\n"
            "GROUP BY ?p\nORDER BY DESC(?frequency)")


def class_hierarchy_query() -> str:
    return ("SELECT DISTINCT ?class ?subclass WHERE {\n"
            f"?class <{RDF_TYPE}> <{OWL_CLASS}> .\n"
            f"?class <{RDFS_SUBCLASSOF}> ?subclass\n}}")


def type_frequency_query() -> str:
    return (f"SELECT DISTINCT ?o (COUNT(?s) AS ?frequency) WHERE {{\n"
            f"?s <{RDF_TYPE}> ?o .\n}}\nGROUP BY ?o\nORDER BY DESC(?frequency)")


def literal_predicate_frequency_query() -> str:
    return ("SELECT DISTINCT ?p (COUNT(?o) AS ?frequency) WHERE {\n?s ?p ?o .\n"
            "FILTER (isliteral(?o))\n}\nGROUP BY ?p\nORDER BY DESC(?frequency)")


def literal_probe_query(predicate: str, config: InitConfig) -> str:
    body = _FILTER_BODY.format(lang=config.language, max_len=config.max_literal_length)
    return (f"SELECT DISTINCT ?o WHERE {{\n?s <{predicate}> ?o .\n"
            f"FILTER ({body})\n}}\nLIMIT 1")


def typed_literal_query(class_uri: str, predicate: str, config: InitConfig,
                        limit: Optional[int] = None,
                        offset: Optional[int] = None) -> str:
    body = _FILTER_BODY.format(lang=config.language, max_len=config.max_literal_length)
    text = (f"SELECT DISTINCT ?o WHERE {{\n?s <{RDF_TYPE}> <{class_uri}> .\n"
            f"?s <{predicate}> ?o .\nFILTER ({body})\n}}")
    return _paged(text, limit, offset)


def significance_query(class_uri: str, predicate: str, config: InitConfig,
                       limit: int, offset: int) -> str:
    # the predicate is literal-associated, so only language/length filters apply
    body = _FILTER_NO_ISLIT.format(lang=config.language,
                                   max_len=config.max_literal_length)
    text = (f"SELECT DISTINCT ?o (COUNT(?subject) AS ?frequency) WHERE {{\n"
            f"?s <{RDF_TYPE}> <{class_uri}> .\n?subject ?p ?s .\n"
            f"?s <{predicate}> ?o .\nFILTER ({body})\n}}\n"
            "GROUP BY ?o\nORDER BY DESC(?frequency)")
    return _paged(text, limit, offset)


def warehouse_literal_query(config: InitConfig, limit: int, offset: int) -> str:
    body = _FILTER_BODY.format(lang=config.language, max_len=config.max_literal_length)
    text = (f"SELECT DISTINCT ?o WHERE {{\n?s ?p ?o .\nFILTER ({body})\n}}\n"
            "GROUP BY ?o")
    return _paged(text, limit, offset)


def warehouse_significance_query(config: InitConfig, limit: int, offset: int) -> str:
    body = _FILTER_BODY.format(lang=config.language, max_len=config.max_literal_length)
    text = (f"SELECT DISTINCT ?o (COUNT(?s1) AS ?frequency) WHERE {{\n"
            f"?s1 ?p ?s2 .\n?s2 ?p2 ?o .\nFILTER ({body})\n}}\n"
            "GROUP BY ?o\nORDER BY DESC(?frequency)")
    return _paged(text, limit, offset)


# --- individual initialization steps ------------------------------------------

def fetch_predicates(runner: QueryRunner) -> list[tuple[str, int]]:
    """All distinct predicates with usage counts, most frequent first."""
    try:
        result = runner.run(predicate_frequency_query())
    except EndpointError as exc:
        raise InitFailure(f"predicate inventory failed: {exc}") from exc
    out = []
    for row in result.rows:
        p = row.get("p")
        if isinstance(p, Uri):
            out.append((p.value, int(row["frequency"].lexical)))
    return out


def fetch_hierarchy(runner: QueryRunner) -> ClassHierarchy:
    try:
        result = runner.run(class_hierarchy_query())
    except EndpointError as exc:
        raise InitFailure(f"class hierarchy retrieval failed: {exc}") from exc
    edges = []
    for row in result.rows:
        child, parent = row.get("class"), row.get("subclass")
        if isinstance(child, Uri) and isinstance(parent, Uri):
            edges.append((parent.value, child.value))
    return build_hierarchy(edges)


def build_hierarchy(edges: list[tuple[str, str]]) -> ClassHierarchy:
    """Assemble parent->children edges, breaking subclass cycles."""
    if not edges:
        return ClassHierarchy()
    child_edges: dict[str, list[str]] = {}
    nodes: set[str] = set()
    for parent, child in sorted(set(edges)):
        nodes.add(parent)
        nodes.add(child)
        child_edges.setdefault(parent, []).append(child)

    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    for start in sorted(nodes):
        if state.get(start):
            continue
        stack = [(start, iter(child_edges.get(start, [])))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for child in it:
                if state.get(child) == 1:
                    child_edges[node] = [c for c in child_edges[node] if c != child]
                    log.warning("dropping subclass edge %s -> %s to break a cycle",
                                node, child)
                elif not state.get(child):
                    state[child] = 1
                    stack.append((child, iter(child_edges.get(child, []))))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()

    has_parent = {c for children in child_edges.values() for c in children}
    roots = sorted(nodes - has_parent)
    return ClassHierarchy(nodes=nodes, child_edges=child_edges, roots=roots)


def fetch_literal_predicates(runner: QueryRunner) -> list[str]:
    """Predicates ordered by how many literal objects they carry."""
    result = runner.run(literal_predicate_frequency_query())
    return [row["p"].value for row in result.rows if isinstance(row.get("p"), Uri)]


def filter_literal_predicates(runner: QueryRunner, predicates: list[str],
                              config: InitConfig) -> list[str]:
    """Keep predicates whose one-row probe passes the language/length filter."""
    kept = []
    for predicate in predicates:
        try:
            result = runner.run(literal_probe_query(predicate, config))
        except QueryTimeout:
            log.warning("probe for %s timed out; excluding it", predicate)
            continue
        except BudgetExhausted:
            log.warning("budget exhausted while probing predicates")
            break
        if result.rows:
            kept.append(predicate)
    return kept


def fetch_types(runner: QueryRunner) -> list[str]:
    result = runner.run(type_frequency_query())
    return [row["o"].value for row in result.rows if isinstance(row.get("o"), Uri)]


def harvest_literals(runner: QueryRunner, hierarchy: ClassHierarchy,
                     predicates: list[str], config: InitConfig,
                     types: Optional[list[str]] = None) -> list[str]:
    """Retrieve filtered literals per predicate, most frequent predicate first.

    With a class hierarchy: descend from the roots, recursing into children
    only when a class times out (a successful answer covers the subtree).
    Without one: paginate per (type, predicate) until a short page. Stops
    quietly when the budget runs out.
    """
    seen: set[str] = set()
    ordered: list[str] = []

    def collect(result: ResultSet) -> None:
        for row in result.rows:
            o = row.get("o")
            if isinstance(o, Literal) and o.lexical not in seen:
                seen.add(o.lexical)
                ordered.append(o.lexical)

    def descend(class_uri: str, predicate: str) -> None:
        try:
            collect(runner.run(typed_literal_query(class_uri, predicate, config)))
        except QueryTimeout:
            for child in hierarchy.children(class_uri):
                descend(child, predicate)

    try:
        if not hierarchy.empty:
            for predicate in predicates:
                for root in hierarchy.roots:
                    descend(root, predicate)
        else:
            for predicate in predicates:
                for type_uri in types or []:
                    offset = 0
                    while True:
                        try:
                            page = runner.run(typed_literal_query(
                                type_uri, predicate, config,
                                limit=config.page_size, offset=offset))
                        except QueryTimeout:
                            log.warning("page for (%s, %s) timed out; moving on",
                                        type_uri, predicate)
                            break
                        collect(page)
                        if len(page.rows) < config.page_size:
                            break
                        offset += config.page_size
    except BudgetExhausted:
        log.info("harvest stopped early: budget exhausted")
    return ordered


def score_significance(runner: QueryRunner, hierarchy: ClassHierarchy,
                       predicates: list[str], harvested: set[str],
                       config: InitConfig,
                       types: Optional[list[str]] = None) -> dict[str, int]:
    """Two-hop upstream subject counts for the harvested literals.

    Issued along the class hierarchy like the harvest; a timed-out first
    page descends into subclasses, later page timeouts abandon that
    (class, predicate) pair. Partial counts from separate (class,
    predicate) iterations add up: sibling classes partition the entities
    under timeout descent, so the sum reconstructs the distinct-subject
    total (it is an estimate when one subject reaches the same literal
    through several predicates).
    """
    scores: dict[str, int] = {}

    def merge(result: ResultSet) -> bool:
        for row in result.rows:
            o = row.get("o")
            if isinstance(o, Literal) and o.lexical in harvested:
                count = int(row["frequency"].lexical)
                scores[o.lexical] = scores.get(o.lexical, 0) + count
        return len(result.rows) < config.page_size

    def paginate(class_uri: str, predicate: str) -> None:
        offset = 0
        while True:
            try:
                page = runner.run(significance_query(
                    class_uri, predicate, config, config.page_size, offset))
            except QueryTimeout:
                if offset == 0:
                    for child in hierarchy.children(class_uri):
                        paginate(child, predicate)
                else:
                    log.warning("significance page (%s, %s, offset=%d) timed out",
                                class_uri, predicate, offset)
                return
            if merge(page):
                return
            offset += config.page_size

    try:
        class_list = hierarchy.roots if not hierarchy.empty else (types or [])
        for predicate in predicates:
            for class_uri in class_list:
                paginate(class_uri, predicate)
    except BudgetExhausted:
        log.info("significance scoring stopped early: budget exhausted")
    return scores


def warehouse_harvest(runner: QueryRunner, config: InitConfig) -> list[str]:
    ordered: list[str] = []
    seen: set[str] = set()
    offset = 0
    try:
        while True:
            page = runner.run(warehouse_literal_query(config, config.page_size, offset))
            for row in page.rows:
                o = row.get("o")
                if isinstance(o, Literal) and o.lexical not in seen:
                    seen.add(o.lexical)
                    ordered.append(o.lexical)
            if len(page.rows) < config.page_size:
                break
            offset += config.page_size
    except BudgetExhausted:
        log.info("warehouse harvest stopped early: budget exhausted")
    return ordered


def warehouse_significance(runner: QueryRunner, harvested: set[str],
                           config: InitConfig) -> dict[str, int]:
    scores: dict[str, int] = {}
    offset = 0
    try:
        while True:
            page = runner.run(warehouse_significance_query(
                config, config.page_size, offset))
            for row in page.rows:
                o = row.get("o")
                if isinstance(o, Literal) and o.lexical in harvested:
                    count = int(row["frequency"].lexical)
                    scores[o.lexical] = scores.get(o.lexical, 0) + count
            if len(page.rows) < config.page_size:
                break
            offset += config.page_size
    except BudgetExhausted:
        log.info("warehouse significance stopped early: budget exhausted")
    return scores


# --- orchestration ------------------------------------------------------------

def initialize(endpoint: Endpoint, config: Optional[InitConfig] = None,
               execute: Executor = execute_remote,
               snapshot_path: Optional[Union[str, Path]] = None) -> CacheSnapshot:
    """Full bootstrap for one endpoint; idempotent, replaces any snapshot."""
    config = config or InitConfig()
    budget = config.query_budget
    if budget is None and endpoint.max_init_queries is not None:
        budget = endpoint.max_init_queries
    runner = QueryRunner(endpoint=endpoint, execute=execute,
                         meter=BudgetMeter(budget))

    predicates: list[tuple[str, int]] = []
    hierarchy = ClassHierarchy()
    literals: list[str] = []
    scores: dict[str, int] = {}
    try:
        predicates = fetch_predicates(runner)
        hierarchy = fetch_hierarchy(runner)
        if config.warehouse_mode:
            literals = warehouse_harvest(runner, config)
            scores = warehouse_significance(runner, set(literals), config)
        else:
            try:
                ordered = fetch_literal_predicates(runner)
            except QueryTimeout:
                log.warning("literal-predicate ranking timed out; "
                            "falling back to overall predicate order")
                ordered = [uri for uri, _ in predicates]
            literal_preds = filter_literal_predicates(runner, ordered, config)
            types = None
            if hierarchy.empty:
                try:
                    types = fetch_types(runner)
                except QueryTimeout:
                    log.warning("type inventory timed out; nothing to harvest")
                    types = []
            literals = harvest_literals(runner, hierarchy, literal_preds,
                                        config, types=types)
            scores = score_significance(runner, hierarchy, literal_preds,
                                        set(literals), config, types=types)
    except BudgetExhausted:
        log.info("initialization stopped early: budget exhausted")

    runner.stats.literal_count = len(literals)
    snapshot = CacheSnapshot(
        endpoint_id=endpoint.id,
        predicates=predicates,
        literals=sorted(((lex, scores.get(lex, 0)) for lex in literals),
                        key=lambda pair: (-pair[1], pair[0])),
        hierarchy=hierarchy,
        language=config.language,
        max_literal_length=config.max_literal_length,
        stats=runner.stats,
    )
    if snapshot_path is not None:
        save_snapshot(snapshot, snapshot_path)
    return snapshot


# --- snapshot persistence -------------------------------------------------------

SNAPSHOT_FORMAT_VERSION = 1


def _dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True,
                      separators=(",", ":"))


def save_snapshot(snapshot: CacheSnapshot, path: Union[str, Path]) -> None:
    """Write the snapshot as JSON lines, atomically (temp file + rename)."""
    path = Path(path)
    lines = [_dumps({
        "kind": "header",
        "format_version": SNAPSHOT_FORMAT_VERSION,
        "endpoint_id": snapshot.endpoint_id,
        "language": snapshot.language,
        "max_literal_length": snapshot.max_literal_length,
        "stats": {
            "queries_issued": snapshot.stats.queries_issued,
            "queries_timed_out": snapshot.stats.queries_timed_out,
            "literal_count": snapshot.stats.literal_count,
        },
    })]
    lines.extend(_dumps({"kind": "predicate", "uri": uri, "frequency": freq})
                 for uri, freq in snapshot.predicates)
    lines.extend(_dumps({"kind": "literal", "lexical": lex, "significance": sig})
                 for lex, sig in snapshot.literals)
    for parent in sorted(snapshot.hierarchy.child_edges):
        for child in snapshot.hierarchy.child_edges[parent]:
            lines.append(_dumps({"kind": "class_edge", "parent": parent,
                                 "child": child}))

    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".",
                               prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_snapshot(path: Union[str, Path]) -> CacheSnapshot:
    predicates: list[tuple[str, int]] = []
    literals: list[tuple[str, int]] = []
    edges: list[tuple[str, str]] = []
    header: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            kind = record.pop("kind")
            if kind == "header":
                if record["format_version"] != SNAPSHOT_FORMAT_VERSION:
                    raise ValueError(
                        f"unsupported snapshot version {record['format_version']}")
                header = record
            elif kind == "predicate":
                predicates.append((record["uri"], record["frequency"]))
            elif kind == "literal":
                literals.append((record["lexical"], record["significance"]))
            elif kind == "class_edge":
                edges.append((record["parent"], record["child"]))
    stats = InitStats(**header.get("stats", {}))
    return CacheSnapshot(
        endpoint_id=header.get("endpoint_id", ""),
        predicates=predicates,
        literals=literals,
        hierarchy=build_hierarchy(edges),
        language=header.get("language", "en"),
        max_literal_length=header.get("max_literal_length", 80),
        stats=stats,
    )
