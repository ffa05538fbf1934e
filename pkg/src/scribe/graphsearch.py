"""Instrumented shortest-path search over callback-provided adjacency.

`MeetingSearch` generalizes bi-directional Dijkstra to any number of
frontier groups (multi-source each): frontiers take turns settling their
minimum-distance vertex, the best meeting cost mu is updated whenever a
scanned edge lands on a vertex the other side has settled, and the search
stops once no pair of frontier tops can beat mu. With two singleton
groups this is exactly classical bi-directional Dijkstra with the
top_f + top_r >= mu stopping rule.

Adjacency is a callable `vertex -> iterable of (neighbor, weight, edge)`;
it may raise BudgetExhausted, which freezes the search with whatever has
been found so far.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional

from .errors import BudgetExhausted

Vertex = Hashable
Adjacency = Callable[[Vertex], Iterable[tuple[Vertex, float, object]]]


@dataclass
class SearchStats:
    expanded: int = 0          # vertices settled (stale heap pops excluded)
    stalled: bool = False      # adjacency ran out of budget


@dataclass
class DijkstraResult:
    dist: dict
    parent: dict               # vertex -> (previous vertex, edge) | None
    stats: SearchStats

    def path_to(self, vertex) -> tuple[list, list]:
        vertices, edges = [vertex], []
        while True:
            hop = self.parent[vertices[-1]]
            if hop is None:
                break
            prev, edge = hop
            vertices.append(prev)
            edges.append(edge)
        vertices.reverse()
        edges.reverse()
        return vertices, edges


def dijkstra(adjacency: Adjacency, sources: Iterable[Vertex],
             targets: Optional[set] = None,
             key: Callable[[Vertex], str] = str) -> DijkstraResult:
    """Classical multi-source Dijkstra; stops once every target settles."""
    dist: dict = {}
    parent: dict = {}
    heap: list = []
    stats = SearchStats()
    for s in sources:
        dist[s] = 0.0
        parent[s] = None
        heapq.heappush(heap, (0.0, key(s), s))
    settled: set = set()
    waiting = set(targets) if targets else None
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in settled or d > dist[v]:
            continue
        settled.add(v)
        stats.expanded += 1
        if waiting is not None:
            waiting.discard(v)
            if not waiting:
                break
        try:
            neighbors = adjacency(v)
        except BudgetExhausted:
            stats.stalled = True
            break
        for z, w, edge in neighbors:
            nd = d + w
            if nd < dist.get(z, math.inf):
                dist[z] = nd
                parent[z] = (v, edge)
                heapq.heappush(heap, (nd, key(z), z))
    return DijkstraResult(dist=dist, parent=parent, stats=stats)


class _Frontier:
    __slots__ = ("fid", "dist", "parent", "settled", "heap", "key")

    def __init__(self, fid: int, sources: Iterable[Vertex], key):
        self.fid = fid
        self.key = key
        self.dist: dict = {}
        self.parent: dict = {}
        self.settled: set = set()
        self.heap: list = []
        for s in sources:
            if s not in self.dist:
                self.dist[s] = 0.0
                self.parent[s] = None
                heapq.heappush(self.heap, (0.0, key(s), s))

    def _discard_stale(self) -> None:
        while self.heap:
            d, _, v = self.heap[0]
            if v in self.settled or d > self.dist.get(v, math.inf):
                heapq.heappop(self.heap)
            else:
                return

    def top(self) -> float:
        self._discard_stale()
        return self.heap[0][0] if self.heap else math.inf

    def pop(self) -> Optional[tuple[float, Vertex]]:
        self._discard_stale()
        if not self.heap:
            return None
        d, _, v = heapq.heappop(self.heap)
        self.settled.add(v)
        return d, v

    def relax(self, z: Vertex, nd: float, v: Vertex, edge) -> None:
        if nd < self.dist.get(z, math.inf):
            self.dist[z] = nd
            self.parent[z] = (v, edge)
            heapq.heappush(self.heap, (nd, self.key(z), z))

    def path_to(self, vertex) -> tuple[list, list]:
        vertices, edges = [vertex], []
        while True:
            hop = self.parent[vertices[-1]]
            if hop is None:
                break
            prev, edge = hop
            vertices.append(prev)
            edges.append(edge)
        vertices.reverse()
        edges.reverse()
        return vertices, edges


@dataclass(frozen=True)
class Meeting:
    cost: float
    left: int            # frontier that scanned the edge
    right: int           # frontier that had already settled the far end
    left_vertex: Vertex
    right_vertex: Vertex
    edge: object


@dataclass
class MeetingResult:
    mu: dict[tuple[int, int], float]
    meetings: dict[tuple[int, int], list[Meeting]]
    frontiers: list[_Frontier]
    stats: SearchStats

    def best_pair(self) -> Optional[tuple[int, int]]:
        if not self.mu:
            return None
        return min(self.mu, key=lambda pair: (self.mu[pair], pair))

    def meeting_paths(self, pair: tuple[int, int]) -> list[tuple[float, list, list]]:
        """(cost, vertices, edges) per recorded equal-cost meeting."""
        out = []
        left_frontier = {f.fid: f for f in self.frontiers}
        for m in sorted(self.meetings.get(pair, []),
                        key=lambda m: (str(m.left_vertex), str(m.right_vertex))):
            lv, le = left_frontier[m.left].path_to(m.left_vertex)
            rv, re_ = left_frontier[m.right].path_to(m.right_vertex)
            vertices = lv + list(reversed(rv))
            edges = le + [m.edge] + list(reversed(re_))
            if m.left > m.right:
                vertices.reverse()
                edges.reverse()
            out.append((m.cost, vertices, edges))
        return out


class MeetingSearch:
    def __init__(self, adjacency: Adjacency, groups: list[Iterable[Vertex]],
                 key: Callable[[Vertex], str] = str, max_equal_paths: int = 5):
        self.adjacency = adjacency
        self.key = key
        self.max_equal_paths = max_equal_paths
        self.frontiers = [_Frontier(i, members, key)
                          for i, members in enumerate(groups)]
        self.mu: dict[tuple[int, int], float] = {}
        self.meetings: dict[tuple[int, int], list[Meeting]] = {}
        self.stats = SearchStats()

    def _record(self, fid: int, other: int, v: Vertex, z: Vertex,
                cost: float, edge) -> None:
        pair = (min(fid, other), max(fid, other))
        best = self.mu.get(pair, math.inf)
        if cost > best:
            return
        meeting = Meeting(cost=cost, left=fid, right=other,
                          left_vertex=v, right_vertex=z, edge=edge)
        if cost < best:
            self.mu[pair] = cost
            self.meetings[pair] = [meeting]
        elif len(self.meetings[pair]) < self.max_equal_paths:
            existing = self.meetings[pair]
            if not any(m.left_vertex == v and m.right_vertex == z
                       and m.edge == edge for m in existing):
                existing.append(meeting)

    def _proven(self) -> bool:
        """No pair of frontier tops can improve on the best meeting.

        A pair whose tops exactly equal mu can still surface additional
        equal-weight meeting paths, so the search keeps going through the
        tie shell until the variant cap is full.
        """
        if not self.mu:
            return False
        mu_star = min(self.mu.values())
        best_count = sum(len(v) for k, v in self.meetings.items()
                         if self.mu[k] == mu_star)
        tops = [f.top() for f in self.frontiers]
        for i, j in itertools.combinations(range(len(tops)), 2):
            total = tops[i] + tops[j]
            if total < mu_star:
                return False
            if total == mu_star and best_count < self.max_equal_paths:
                return False
        return True

    def run(self) -> MeetingResult:
        frontiers = self.frontiers
        rotation = itertools.cycle(range(len(frontiers)))
        idle_streak = 0
        while not self._proven():
            alive = [f for f in frontiers if f.top() < math.inf]
            if not alive or self.stats.stalled:
                break
            fid = next(rotation)
            frontier = frontiers[fid]
            popped = frontier.pop()
            if popped is None:
                idle_streak += 1
                if idle_streak >= len(frontiers):
                    break
                continue
            idle_streak = 0
            d, v = popped
            self.stats.expanded += 1
            try:
                neighbors = list(self.adjacency(v))
            except BudgetExhausted:
                self.stats.stalled = True
                break
            for z, w, edge in neighbors:
                frontier.relax(z, d + w, v, edge)
                for other in frontiers:
                    if other.fid != fid and z in other.settled:
                        self._record(fid, other.fid, v, z,
                                     d + w + other.dist[z], edge)
        return MeetingResult(mu=self.mu, meetings=self.meetings,
                             frontiers=frontiers, stats=self.stats)


def bidirectional_dijkstra(adjacency: Adjacency, source: Vertex, target: Vertex,
                           key: Callable[[Vertex], str] = str
                           ) -> Optional[tuple[float, list, int]]:
    """Shortest path between two vertices by alternating expansion.

    Returns (distance, vertex path, expanded count) or None when the
    vertices are disconnected.
    """
    if source == target:
        return 0.0, [source], 0
    search = MeetingSearch(adjacency, [[source], [target]], key=key)
    result = search.run()
    pair = result.best_pair()
    if pair is None:
        return None
    cost, vertices, _ = result.meeting_paths(pair)[0]
    return cost, vertices, result.stats.expanded
