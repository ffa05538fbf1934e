"""Structural query relaxation.

When the shape of a query does not match the data, the literals it
mentions (and their close alternatives) are treated as terminal groups
and connected through the dataset graph with an approximate Steiner
tree: alternating frontier expansion picks the first meeting path, every
remaining group is attached via its shortest path to the growing graph,
and each resulting subgraph is reduced to a minimum spanning tree with
degree-1 non-terminals pruned away. Edges matching a query predicate (or
an alternative of one) weigh less than everything else, so returned
trees prefer the user's own vocabulary.

The dataset graph lives behind a SPARQL endpoint, so vertex expansion is
metered by a hard query budget and memoized; re-expanding a known vertex
is free.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import BudgetExhausted, EndpointError, NoConnectionFound, ScribeError
from .federation import prefetch
from .graphsearch import MeetingSearch
from .literal_index import LiteralIndex
from .rdf import (
    Endpoint,
    Literal,
    Modifiers,
    StructuredQuery,
    Term,
    TriplePattern,
    Uri,
    Variable,
    execute_remote,
    serialize,
)
from .similarity import JwParams
from .suggestions import (
    QsmDeps,
    SuggestedQuery,
    WindowParams,
    find_literal_alternatives,
    find_predicate_alternatives,
)

log = logging.getLogger(__name__)

DEFAULT_EXPANSION_BUDGET = 100
DEFAULT_SEED_GROUP_SIZE = 10
DEFAULT_MAX_VARIANTS = 5


@dataclass(frozen=True)
class GraphEdge:
    """A dataset triple seen during expansion; direction is preserved."""
    subject: Term
    predicate: str
    object: Term

    def other(self, vertex: Term) -> Term:
        return self.object if vertex == self.subject else self.subject

    def key(self) -> tuple[str, str, str]:
        return (str(self.subject), self.predicate, str(self.object))


@dataclass(frozen=True)
class WeightedEdgeModel:
    """Edge weights inferred from the predicate, never materialized."""
    query_predicates: frozenset = frozenset()
    wq: float = 1.0
    wdefault: float = 2.0

    def __post_init__(self):
        if not 0 < self.wq < self.wdefault:
            raise ValueError("weights must satisfy 0 < wq < wdefault")

    def weight(self, predicate: str) -> float:
        return self.wq if predicate in self.query_predicates else self.wdefault


@dataclass
class SeedGroup:
    group_id: int
    original: Literal
    members: list[Term]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a seed group needs at least one member")


@dataclass
class ExpansionBudget:
    limit: int = DEFAULT_EXPANSION_BUDGET
    used: int = 0
    memo: dict[Term, list[GraphEdge]] = field(default_factory=dict)
    memo_hits: int = 0

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def charge(self, queries: int) -> None:
        if self.used + queries > self.limit:
            raise BudgetExhausted(
                f"expansion budget of {self.limit} queries used up")
        self.used += queries


class GraphExplorer:
    """Expands dataset vertices through SPARQL, accumulating the seen graph."""

    def __init__(self, endpoint: Endpoint, weights: WeightedEdgeModel,
                 budget: Optional[ExpansionBudget] = None,
                 execute=execute_remote):
        self.endpoint = endpoint
        self.weights = weights
        self.budget = budget or ExpansionBudget()
        self.execute = execute
        self.graph: dict[Term, set[GraphEdge]] = {}
        self.expansion_order: list[str] = []
        self.guard_skips: list[str] = []

    def expand(self, vertex: Term) -> list[GraphEdge]:
        """Neighbors of `vertex`: incoming triples only for literals, both
        directions for URIs. Memoized; each fresh call issues one or two
        metered queries."""
        budget = self.budget
        if vertex in budget.memo:
            budget.memo_hits += 1
            return budget.memo[vertex]
        if isinstance(vertex, Literal):
            queries = [f"SELECT ?s ?p WHERE {{ ?s ?p {vertex} }}"]
        else:
            queries = [f"SELECT ?p ?o WHERE {{ {vertex} ?p ?o }}",
                       f"SELECT ?s ?p WHERE {{ ?s ?p {vertex} }}"]
        budget.charge(len(queries))
        self.expansion_order.append(str(vertex))
        edges: list[GraphEdge] = []
        seen: set[tuple] = set()
        for text in queries:
            try:
                result = self.execute(self.endpoint, text)
            except EndpointError as exc:
                log.warning("expansion query failed (%s); continuing", exc)
                continue
            for row in result.rows:
                if "o" in row:
                    edge = GraphEdge(vertex, row["p"].value, row["o"])
                else:
                    edge = GraphEdge(row["s"], row["p"].value, vertex)
                if edge.key() not in seen:
                    seen.add(edge.key())
                    edges.append(edge)
        budget.memo[vertex] = edges
        for edge in edges:
            self.graph.setdefault(edge.subject, set()).add(edge)
            self.graph.setdefault(edge.object, set()).add(edge)
        return edges

    def adjacency(self, vertex: Term):
        edges = self.expand(vertex)
        neighbors = {edge.other(vertex) for edge in edges} - {vertex}
        if len(neighbors) > self.budget.remaining:
            # high fan-out vertex: leave its children unexplored and hope
            # another group's frontier reaches this subgraph instead
            self.guard_skips.append(str(vertex))
            return []
        return [(edge.other(vertex), self.weights.weight(edge.predicate), edge)
                for edge in edges if edge.other(vertex) != vertex]


def build_seed_groups(query: StructuredQuery, index: LiteralIndex,
                      window: WindowParams = WindowParams(),
                      jw: Optional[JwParams] = None,
                      k: int = DEFAULT_SEED_GROUP_SIZE,
                      pool=None) -> list[SeedGroup]:
    """One group per distinct query literal: the literal itself plus up to
    k-1 similarity alternatives whose lengths stay within the window."""
    jw = jw or JwParams()
    groups: list[SeedGroup] = []
    seen: set[str] = set()
    for pattern in query.patterns:
        literal = pattern.object
        if not isinstance(literal, Literal) or literal.lexical in seen:
            continue
        seen.add(literal.lexical)
        members: list[Term] = [literal]
        if index.language and literal.language != index.language:
            # the dataset caches language-tagged literals; seed the tagged
            # twin so the group can reach the stored graph
            twin = Literal(literal.lexical, language=index.language)
            members.append(twin)
        low, high = window.bounds(len(literal.lexical))
        for alt in find_literal_alternatives(literal, index, window, jw, pool):
            lex = alt.replacement.lexical
            if low <= len(lex) <= high and alt.replacement not in members:
                members.append(alt.replacement)
            if len(members) >= k:
                break
        groups.append(SeedGroup(group_id=len(groups), original=literal,
                                members=members))
    return groups


@dataclass
class ConnectedGraph:
    vertices: set[Term]
    edges: set[GraphEdge]
    terminals: dict[int, Term]  # group id -> the literal that joined


def connect_seeds(groups: list[SeedGroup], explorer: GraphExplorer,
                  max_variants: int = DEFAULT_MAX_VARIANTS
                  ) -> list[ConnectedGraph]:
    """Grow frontiers around every group until one literal per group is
    connected; partial graphs are returned when the budget dies first."""
    if len(groups) < 2:
        raise ScribeError("relaxation needs at least two seed groups")

    search = MeetingSearch(explorer.adjacency, [g.members for g in groups],
                           key=str, max_equal_paths=max_variants)
    result = search.run()
    pair = result.best_pair()
    if pair is None:
        raise NoConnectionFound("no path between any two seed groups")
    first, second = pair
    variants: list[ConnectedGraph] = []
    for _cost, vertices, edges in result.meeting_paths(pair)[:max_variants]:
        variants.append(ConnectedGraph(
            vertices=set(vertices), edges=set(edges),
            terminals={groups[first].group_id: vertices[0],
                       groups[second].group_id: vertices[-1]}))

    remaining = [g for i, g in enumerate(groups) if i not in (first, second)]
    while remaining:
        target_vertices = sorted({v for variant in variants
                                  for v in variant.vertices}, key=str)
        best: Optional[tuple[float, SeedGroup, list]] = None
        for group in remaining:
            attach = MeetingSearch(explorer.adjacency,
                                   [group.members, target_vertices],
                                   key=str, max_equal_paths=max_variants)
            attach_result = attach.run()
            attach_pair = attach_result.best_pair()
            if attach_pair is not None:
                cost = attach_result.mu[attach_pair]
                if best is None or cost < best[0]:
                    best = (cost, group, attach_result.meeting_paths(attach_pair))
        if best is None:
            log.info("could not attach %d remaining group(s)", len(remaining))
            break
        _cost, group, paths = best
        extended: list[ConnectedGraph] = []
        seen_edge_sets: set[frozenset] = set()
        for variant in variants:
            for _c, vertices, edges in paths:
                if vertices[-1] not in variant.vertices:
                    continue
                merged_edges = variant.edges | set(edges)
                fingerprint = frozenset(e.key() for e in merged_edges)
                if fingerprint in seen_edge_sets:
                    continue
                seen_edge_sets.add(fingerprint)
                terminals = dict(variant.terminals)
                terminals[group.group_id] = vertices[0]
                extended.append(ConnectedGraph(
                    vertices=variant.vertices | set(vertices),
                    edges=merged_edges, terminals=terminals))
        if extended:
            variants = extended[:max_variants]
        remaining.remove(group)
    return variants


@dataclass(frozen=True)
class RelaxationTree:
    vertices: frozenset
    edges: tuple[GraphEdge, ...]
    terminals: tuple[tuple[int, Term], ...]  # (group id, literal vertex)
    total_weight: float

    def terminal_for(self, group_id: int) -> Optional[Term]:
        return dict(self.terminals).get(group_id)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        root = x
        while self.parent.setdefault(root, root) != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def build_trees(variants: list[ConnectedGraph],
                graph: dict[Term, set[GraphEdge]],
                groups: list[SeedGroup],
                weights: WeightedEdgeModel) -> list[RelaxationTree]:
    """Induce each variant in the explored graph, take a minimum spanning
    tree, prune degree-1 non-terminals, and deduplicate the results."""
    trees: list[RelaxationTree] = []
    fingerprints: set[frozenset] = set()
    for variant in variants:
        if len(variant.terminals) < 2:
            continue
        vertices = set(variant.vertices)
        induced: dict[tuple[str, str], GraphEdge] = {}
        for vertex in vertices:
            for edge in graph.get(vertex, ()):
                u, w = edge.subject, edge.object
                if u in vertices and w in vertices and u != w:
                    pair = tuple(sorted((str(u), str(w))))
                    current = induced.get(pair)
                    if current is None or (
                            (weights.weight(edge.predicate), edge.key())
                            < (weights.weight(current.predicate), current.key())):
                        induced[pair] = edge

        forest = _UnionFind()
        mst: list[GraphEdge] = []
        for edge in sorted(induced.values(),
                           key=lambda e: (weights.weight(e.predicate), e.key())):
            if forest.union(str(edge.subject), str(edge.object)):
                mst.append(edge)

        terminals = set(variant.terminals.values())
        adjacency: dict[Term, set[GraphEdge]] = {}
        for edge in mst:
            adjacency.setdefault(edge.subject, set()).add(edge)
            adjacency.setdefault(edge.object, set()).add(edge)
        changed = True
        while changed:
            changed = False
            for vertex in sorted(adjacency, key=str):
                if vertex not in terminals and len(adjacency[vertex]) == 1:
                    (edge,) = adjacency[vertex]
                    adjacency.pop(vertex)
                    other = edge.other(vertex)
                    adjacency[other].discard(edge)
                    changed = True

        kept_edges = sorted({e for bucket in adjacency.values() for e in bucket},
                            key=lambda e: e.key())
        kept_vertices = frozenset(adjacency)
        if not kept_edges:
            continue
        # one terminal per group: a path sneaking through a sibling seed
        # invalidates the variant
        valid = True
        for group in groups:
            if len(set(group.members) & kept_vertices) > 1:
                valid = False
                break
        if not valid:
            continue
        fingerprint = frozenset(e.key() for e in kept_edges)
        if fingerprint in fingerprints:
            continue
        fingerprints.add(fingerprint)
        trees.append(RelaxationTree(
            vertices=kept_vertices,
            edges=tuple(kept_edges),
            terminals=tuple(sorted(
                ((gid, term) for gid, term in variant.terminals.items()
                 if term in kept_vertices), key=lambda item: item[0])),
            total_weight=sum(weights.weight(e.predicate) for e in kept_edges)))
    return trees


# --- turning trees back into queries -----------------------------------------

def _tree_adjacency(tree: RelaxationTree) -> dict[Term, list[GraphEdge]]:
    adjacency: dict[Term, list[GraphEdge]] = {}
    for edge in tree.edges:
        adjacency.setdefault(edge.subject, []).append(edge)
        adjacency.setdefault(edge.object, []).append(edge)
    for bucket in adjacency.values():
        bucket.sort(key=lambda e: e.key())
    return adjacency


def _bfs_order(tree: RelaxationTree) -> list[Term]:
    adjacency = _tree_adjacency(tree)
    start = min((term for _, term in tree.terminals), key=str)
    order, queue, seen = [], [start], {start}
    while queue:
        vertex = queue.pop(0)
        order.append(vertex)
        for edge in adjacency.get(vertex, []):
            neighbor = edge.other(vertex)
            if neighbor not in seen:
                seen.add(neighbor)
                queue.append(neighbor)
    return order


def _locate_subject(tree: RelaxationTree, terminal: Term, predicate: str,
                    alternatives: set[str]) -> Optional[Term]:
    """Nearest tree edge labeled with the user's predicate (or an
    alternative); its RDF subject is where the user's variable points."""
    adjacency = _tree_adjacency(tree)
    queue, seen = [terminal], {terminal}
    while queue:
        vertex = queue.pop(0)
        for edge in adjacency.get(vertex, []):
            if edge.predicate == predicate or edge.predicate in alternatives:
                if isinstance(edge.subject, Uri):
                    return edge.subject
            neighbor = edge.other(vertex)
            if neighbor not in seen:
                seen.add(neighbor)
                queue.append(neighbor)
    return None


def _adjacent_vertex(tree: RelaxationTree, terminal: Term) -> Optional[Term]:
    for edge in tree.edges:
        if edge.object == terminal and isinstance(edge.subject, Uri):
            return edge.subject
    return None


def tree_to_query(tree: RelaxationTree, original: StructuredQuery,
                  groups: list[SeedGroup],
                  predicate_alternatives: dict[str, set[str]]) -> StructuredQuery:
    """Literals stay constants, URI vertices become fresh variables, and
    the user's projected variables are mapped onto the vertices their
    predicates point at (falling back to projecting every variable)."""
    taken = {v.name for p in original.patterns for v in p.terms()
             if isinstance(v, Variable)}
    var_of: dict[Term, str] = {}
    counter = 1
    for vertex in _bfs_order(tree):
        if isinstance(vertex, Uri):
            while f"v{counter}" in taken:
                counter += 1
            var_of[vertex] = f"v{counter}"
            counter += 1

    group_by_lexical = {g.original.lexical: g for g in groups}
    mapping: dict[str, Term] = {}
    consistent = True
    for pattern in original.patterns:
        s, p, o = pattern.subject, pattern.predicate, pattern.object
        if not (isinstance(s, Variable) and isinstance(p, Uri)
                and isinstance(o, Literal)):
            continue
        group = group_by_lexical.get(o.lexical)
        if group is None:
            continue
        terminal = tree.terminal_for(group.group_id)
        if terminal is None:
            continue
        vertex = _locate_subject(tree, terminal, p.value,
                                 predicate_alternatives.get(p.value, set()))
        if vertex is None:
            vertex = _adjacent_vertex(tree, terminal)
        if vertex is None:
            continue
        if s.name in mapping and mapping[s.name] != vertex:
            consistent = False
        mapping[s.name] = vertex

    if mapping and consistent:
        for user_name, vertex in mapping.items():
            var_of[vertex] = user_name
        projection = sorted(mapping)
        modifiers = Modifiers(distinct=True)
    else:
        projection = sorted(var_of.values())
        modifiers = Modifiers()

    def materialize(term: Term) -> Term:
        return Variable(var_of[term]) if term in var_of else term

    patterns = [TriplePattern(materialize(e.subject), Uri(e.predicate),
                              materialize(e.object)) for e in tree.edges]
    return StructuredQuery(patterns=patterns, projection=projection,
                           modifiers=modifiers)


def trees_to_queries(trees: list[RelaxationTree], original: StructuredQuery,
                     groups: list[SeedGroup],
                     predicate_alternatives: dict[str, set[str]],
                     deps: QsmDeps) -> list[SuggestedQuery]:
    """Convert, execute, and keep only the trees whose query has answers."""
    candidates: list[tuple[StructuredQuery, RelaxationTree]] = []
    fingerprints: set = set()
    for tree in trees:
        query = tree_to_query(tree, original, groups, predicate_alternatives)
        # pattern order is irrelevant to the semantics; different trees
        # may generalize to the same query
        fingerprint = (frozenset(repr(p) for p in query.patterns),
                       tuple(query.projection))
        if fingerprint not in fingerprints:
            fingerprints.add(fingerprint)
            candidates.append((query, tree))
    results = prefetch(deps.registry, [q for q, _ in candidates],
                       endpoint_ids=deps.endpoint_ids, fan_out=deps.fan_out,
                       execute=deps.execute)
    out = []
    for (query, tree), result in zip(candidates, results):
        if result is not None and result.answer_count >= 1:
            out.append(SuggestedQuery(query=query, change=tree,
                                      answer_count=result.answer_count,
                                      prefetched=result.rows))
    return out


# --- top level -----------------------------------------------------------------

@dataclass
class RelaxationTrace:
    budget_limit: int = DEFAULT_EXPANSION_BUDGET
    budget_used: int = 0
    memo_hits: int = 0
    expansion_order: list[str] = field(default_factory=list)
    guard_skips: list[str] = field(default_factory=list)
    groups: list[dict] = field(default_factory=list)
    trees: int = 0
    suggestions: int = 0
    skipped: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, ensure_ascii=False, indent=2,
                          sort_keys=True)


@dataclass
class RelaxationPlan:
    trees: list[RelaxationTree]
    groups: list[SeedGroup]
    predicate_alternatives: dict[str, set[str]]
    trace: RelaxationTrace


def plan_relaxation(query: StructuredQuery, deps: QsmDeps, endpoint: Endpoint,
                    budget_limit: int = DEFAULT_EXPANSION_BUDGET,
                    seed_group_size: int = DEFAULT_SEED_GROUP_SIZE,
                    max_variants: int = DEFAULT_MAX_VARIANTS) -> RelaxationPlan:
    """Everything up to (not including) executing the candidate queries."""
    trace = RelaxationTrace(budget_limit=budget_limit)
    groups = build_seed_groups(query, deps.index, deps.window, deps.jw,
                               k=seed_group_size, pool=deps.pool)
    trace.groups = [{"original": g.original.lexical,
                     "members": [str(m) for m in g.members]} for g in groups]
    if len(groups) < 2:
        # a Steiner connection needs two terminal groups; with fewer
        # literals, term substitution is the only suggestion channel
        trace.skipped = "fewer than two literal groups"
        return RelaxationPlan([], groups, {}, trace)

    predicate_alternatives: dict[str, set[str]] = {}
    query_predicates: set[str] = set()
    for pattern in query.patterns:
        p = pattern.predicate
        if isinstance(p, Uri):
            query_predicates.add(p.value)
            alts = find_predicate_alternatives(p, deps.predicates,
                                               deps.lexicon, deps.jw)
            predicate_alternatives[p.value] = {
                a.replacement.value for a in alts}
    weighted = set(query_predicates)
    for alternatives in predicate_alternatives.values():
        weighted |= alternatives
    weights = WeightedEdgeModel(query_predicates=frozenset(weighted))

    explorer = GraphExplorer(endpoint, weights,
                             budget=ExpansionBudget(limit=budget_limit),
                             execute=deps.execute)
    trees: list[RelaxationTree] = []
    try:
        variants = connect_seeds(groups, explorer, max_variants=max_variants)
        trees = build_trees(variants, explorer.graph, groups, weights)
    except NoConnectionFound as exc:
        trace.skipped = str(exc)
    trace.budget_used = explorer.budget.used
    trace.memo_hits = explorer.budget.memo_hits
    trace.expansion_order = explorer.expansion_order
    trace.guard_skips = explorer.guard_skips
    trace.trees = len(trees)
    return RelaxationPlan(trees, groups, predicate_alternatives, trace)


def relax_structure(query: StructuredQuery, deps: QsmDeps, endpoint: Endpoint,
                    budget_limit: int = DEFAULT_EXPANSION_BUDGET,
                    seed_group_size: int = DEFAULT_SEED_GROUP_SIZE,
                    max_variants: int = DEFAULT_MAX_VARIANTS
                    ) -> tuple[list[SuggestedQuery], RelaxationTrace]:
    """Full relaxation pass; returns (suggestions, diagnostic trace)."""
    plan = plan_relaxation(query, deps, endpoint, budget_limit,
                           seed_group_size, max_variants)
    suggestions = trees_to_queries(plan.trees, query, plan.groups,
                                   plan.predicate_alternatives, deps)
    plan.trace.suggestions = len(suggestions)
    return suggestions, plan.trace
