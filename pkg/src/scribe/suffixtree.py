"""Generalized suffix tree (Ukkonen construction) over a set of strings.

Strings are concatenated with per-string unique sentinel symbols and the
tree is built online in one pass, linear in the total input length. A
lookup walks at most ``|t|`` edges and then collects the leaves below the
locus, so its cost is O(|t| + z) for z occurrences; ``lookup_with_stats``
exposes the visited-node counter that the acceptance suite checks against
that bound.

Matching is exact at this layer; any case-folding policy belongs to the
caller.
"""
from __future__ import annotations

from bisect import bisect_right
from typing import Optional


class _Node:
    __slots__ = ("start", "end", "children", "slink", "suffix")

    def __init__(self, start: int, end: Optional[int]):
        self.start = start
        self.end = end          # None while the leaf is still open
        self.children: dict[int, _Node] = {}
        self.slink: Optional[_Node] = None
        self.suffix: Optional[int] = None  # suffix start position, leaves only


class SuffixTree:
    def __init__(self, strings: Optional[list[str]] = None):
        self._seq: list[int] = []
        self._bounds: list[int] = []   # end position of each string's sentinel
        self._strings: list[str] = []
        self._root = _Node(-1, -1)
        self._root.slink = self._root
        self._active_node = self._root
        self._active_edge = 0
        self._active_length = 0
        self._remainder = 0
        self._finalized = False
        for s in strings or ():
            self.add(s)

    @property
    def string_count(self) -> int:
        return len(self._strings)

    @property
    def strings(self) -> list[str]:
        return list(self._strings)

    def add(self, text: str) -> int:
        """Insert a string; returns its id. Ids are dense and stable."""
        if self._finalized:
            raise RuntimeError("tree is frozen after the first lookup")
        string_id = len(self._strings)
        self._strings.append(text)
        sentinel = -(string_id + 1)  # unique, cannot collide with code points
        for symbol in [ord(c) for c in text] + [sentinel]:
            self._extend(symbol)
        self._bounds.append(len(self._seq))
        return string_id

    def _extend(self, symbol: int) -> None:
        seq = self._seq
        i = len(seq)
        seq.append(symbol)
        self._remainder += 1
        last_internal: Optional[_Node] = None
        root = self._root
        while self._remainder > 0:
            if self._active_length == 0:
                self._active_edge = i
            edge_symbol = seq[self._active_edge]
            nxt = self._active_node.children.get(edge_symbol)
            if nxt is None:
                self._active_node.children[edge_symbol] = _Node(i, None)
                if last_internal is not None:
                    last_internal.slink = self._active_node
                    last_internal = None
            else:
                edge_len = (nxt.end if nxt.end is not None else i + 1) - nxt.start
                if self._active_length >= edge_len:
                    self._active_edge += edge_len
                    self._active_length -= edge_len
                    self._active_node = nxt
                    continue
                if seq[nxt.start + self._active_length] == symbol:
                    self._active_length += 1
                    if last_internal is not None:
                        last_internal.slink = self._active_node
                    break
                split = _Node(nxt.start, nxt.start + self._active_length)
                self._active_node.children[edge_symbol] = split
                split.children[symbol] = _Node(i, None)
                nxt.start += self._active_length
                split.children[seq[nxt.start]] = nxt
                if last_internal is not None:
                    last_internal.slink = split
                last_internal = split
            self._remainder -= 1
            if self._active_node is root and self._active_length > 0:
                self._active_length -= 1
                self._active_edge = i - self._remainder + 1
            elif self._active_node is not root:
                self._active_node = self._active_node.slink or root

    def _finalize(self) -> None:
        """Close open leaves and record each leaf's suffix start position."""
        total = len(self._seq)
        stack = [(self._root, 0)]
        while stack:
            node, depth = stack.pop()
            if node.end is None:
                node.end = total
            edge_len = node.end - node.start if node.start >= 0 else 0
            depth += edge_len
            if node.children:
                for child in node.children.values():
                    stack.append((child, depth))
            else:
                node.suffix = total - depth
        self._finalized = True

    def lookup(self, text: str) -> list[int]:
        """Ids of indexed strings containing `text` as a substring."""
        return self.lookup_with_stats(text)[0]

    def lookup_with_stats(self, text: str) -> tuple[list[int], int, int]:
        """Returns (string ids, nodes visited, occurrence count z)."""
        if not self._finalized:
            self._finalize()
        symbols = [ord(c) for c in text]
        seq = self._seq
        node = self._root
        visits = 1
        pos = 0
        while pos < len(symbols):
            child = node.children.get(symbols[pos])
            if child is None:
                return [], visits, 0
            visits += 1
            take = min(child.end - child.start, len(symbols) - pos)
            if seq[child.start:child.start + take] != symbols[pos:pos + take]:
                return [], visits, 0
            pos += take
            node = child
        # collect leaves below the locus; every leaf is one occurrence
        ids = set()
        occurrences = 0
        stack = [node]
        while stack:
            current = stack.pop()
            if current is not node:
                visits += 1
            if current.children:
                stack.extend(current.children.values())
            else:
                occurrences += 1
                # an occurrence never spans a sentinel, so the suffix's
                # string also contains the whole of `text`
                ids.add(bisect_right(self._bounds, current.suffix))
        return sorted(ids), visits, occurrences
