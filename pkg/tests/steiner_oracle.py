"""Exact Steiner-tree optimum by exhaustive enumeration (test oracle).

Only usable on tiny instances: tries every vertex subset containing the
terminals and takes the cheapest spanning tree among the connected ones.
"""
from __future__ import annotations

import heapq
from itertools import combinations


def shortest_path_dijkstra(adjacency: dict, source, target):
    """Self-contained Dijkstra used as an independent distance oracle."""
    dist = {source: 0}
    heap = [(0, str(source), source)]
    done = set()
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == target:
            return d
        for neighbor, weight in adjacency.get(v, []):
            nd = d + weight
            if nd < dist.get(neighbor, float("inf")):
                dist[neighbor] = nd
                heapq.heappush(heap, (nd, str(neighbor), neighbor))
    return None


def _mst_weight(vertices: set, edges: dict) -> float | None:
    """Kruskal over the induced subgraph; None when disconnected."""
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    usable = sorted(((w, a, b) for (a, b), w in edges.items()
                     if a in vertices and b in vertices),
                    key=lambda item: (item[0], str(item[1]), str(item[2])))
    total = 0.0
    joined = 0
    for w, a, b in usable:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            total += w
            joined += 1
    return total if joined == len(vertices) - 1 else None


def steiner_optimum(vertices: list, edges: dict, terminals: list) -> float | None:
    """edges: (u, v) -> weight with u, v in canonical order."""
    optional = [v for v in vertices if v not in terminals]
    best = None
    for r in range(len(optional) + 1):
        for extra in combinations(optional, r):
            subset = set(terminals) | set(extra)
            weight = _mst_weight(subset, edges)
            if weight is not None and (best is None or weight < best):
                best = weight
    return best
