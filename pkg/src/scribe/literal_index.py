"""Lookup substrate for completion and suggestion.

A generalized suffix tree indexes every predicate display name plus the
top-K most significant literals; everything else lands in residual bins
keyed by exact character length for windowed sequential scans. Matching
is case-insensitive throughout: entries carry a case-folded copy and the
original casing is what gets returned.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .initializer import CacheSnapshot, ClassHierarchy, InitStats
from .rdf import local_name
from .suffixtree import SuffixTree

_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|[_\-]+")

PREDICATE = "predicate"
LITERAL = "literal"


@dataclass(frozen=True)
class IndexEntry:
    display: str
    kind: str           # PREDICATE or LITERAL
    canonical: str      # full predicate URI, or the literal's lexical form
    folded: str
    significance: int = 0

    @classmethod
    def predicate(cls, display: str, uri: str) -> "IndexEntry":
        return cls(display=display, kind=PREDICATE, canonical=uri,
                   folded=display.casefold())

    @classmethod
    def literal(cls, lexical: str, significance: int) -> "IndexEntry":
        return cls(display=lexical, kind=LITERAL, canonical=lexical,
                   folded=lexical.casefold(), significance=significance)


def split_words(name: str) -> str:
    """camelCase/underscored local names as space-joined lowercase words."""
    return " ".join(part for part in _CAMEL.split(name) if part).lower()


class ResidualBins:
    """Literals grouped by exact length; immutable once built."""

    def __init__(self, entries: Iterable[IndexEntry]):
        grouped: dict[int, list[IndexEntry]] = {}
        for entry in entries:
            grouped.setdefault(len(entry.display), []).append(entry)
        self._bins = {key: tuple(sorted(values, key=lambda e: e.display))
                      for key, values in grouped.items()}
        self.total_count = sum(len(v) for v in self._bins.values())

    def keys(self) -> list[int]:
        return sorted(self._bins)

    def bin(self, key: int) -> tuple[IndexEntry, ...]:
        return self._bins.get(key, ())

    def in_range(self, low: int, high: int) -> list[tuple[int, tuple[IndexEntry, ...]]]:
        return [(key, self._bins[key]) for key in sorted(self._bins)
                if low <= key <= high]

    def range_counts(self, low: int, high: int) -> list[tuple[int, int]]:
        if low > high:
            raise ValueError("low must be <= high")
        return [(key, len(entries)) for key, entries in self.in_range(low, high)]

    def __eq__(self, other):
        return isinstance(other, ResidualBins) and self._bins == other._bins


@dataclass
class LiteralIndex:
    tree_entries: list[IndexEntry]
    bins: ResidualBins
    tree: SuffixTree
    k: int
    max_literal_length: int
    language: str

    def tree_lookup(self, text: str, limit: Optional[int] = None,
                    kinds: Optional[set[str]] = None) -> list[IndexEntry]:
        """Indexed strings containing `text`, shortest first."""
        if not text:
            return []
        ids = self.tree.lookup(text.casefold())
        found = [self.tree_entries[i] for i in ids]
        if kinds is not None:
            found = [e for e in found if e.kind in kinds]
        found.sort(key=lambda e: (len(e.display), e.display))
        return found if limit is None else found[:limit]

    def bin_range(self, low: int, high: int) -> list[tuple[int, int]]:
        """Non-empty residual bins with keys in [low, high] and their sizes."""
        return self.bins.range_counts(low, high)

    @property
    def tree_literals(self) -> list[IndexEntry]:
        return [e for e in self.tree_entries if e.kind == LITERAL]


def build_index(snapshot: CacheSnapshot, k: int = 40_000) -> LiteralIndex:
    """Index all predicates plus the top-`k` literals by significance.

    Ties at the admission boundary go to the lexicographically smaller
    literal; the rest are binned by exact length.
    """
    tree_entries: list[IndexEntry] = []
    for uri, _freq in snapshot.predicates:
        name = local_name(uri)
        tree_entries.append(IndexEntry.predicate(name, uri))
        split = split_words(name)
        if split != name:
            tree_entries.append(IndexEntry.predicate(split, uri))

    ranked = sorted(snapshot.literals, key=lambda pair: (-pair[1], pair[0]))
    admitted = ranked[:k]
    residual = ranked[k:]
    tree_entries.extend(IndexEntry.literal(lex, sig) for lex, sig in admitted)

    tree = SuffixTree([e.folded for e in tree_entries])
    bins = ResidualBins(IndexEntry.literal(lex, sig) for lex, sig in residual)
    return LiteralIndex(tree_entries=tree_entries, bins=bins, tree=tree, k=k,
                        max_literal_length=snapshot.max_literal_length,
                        language=snapshot.language)


# --- serialization ------------------------------------------------------------

INDEX_FORMAT_VERSION = 1


def save_index(index: LiteralIndex, path: Union[str, Path]) -> None:
    """JSON-lines dump; loading rebuilds the exact same index."""
    records = [{"kind": "header", "format_version": INDEX_FORMAT_VERSION,
                "k": index.k, "language": index.language,
                "max_literal_length": index.max_literal_length}]
    seen = set()
    for entry in index.tree_entries:
        if entry.kind == PREDICATE and entry.canonical not in seen:
            seen.add(entry.canonical)
            records.append({"kind": "predicate", "uri": entry.canonical})
    for entry in index.tree_literals:
        records.append({"kind": "literal", "lexical": entry.canonical,
                        "significance": entry.significance, "in_tree": True})
    for key in index.bins.keys():
        for entry in index.bins.bin(key):
            records.append({"kind": "literal", "lexical": entry.canonical,
                            "significance": entry.significance, "in_tree": False})
    text = "\n".join(json.dumps(r, ensure_ascii=False, sort_keys=True,
                                separators=(",", ":")) for r in records)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_index(path: Union[str, Path]) -> LiteralIndex:
    predicates: list[tuple[str, int]] = []
    literals: list[tuple[str, int]] = []
    header: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            if record["kind"] == "header":
                if record["format_version"] != INDEX_FORMAT_VERSION:
                    raise ValueError(
                        f"unsupported index version {record['format_version']}")
                header = record
            elif record["kind"] == "predicate":
                predicates.append((record["uri"], 0))
            elif record["kind"] == "literal":
                literals.append((record["lexical"], record["significance"]))
    snapshot = CacheSnapshot(
        endpoint_id="", predicates=predicates, literals=literals,
        hierarchy=ClassHierarchy(), language=header.get("language", "en"),
        max_literal_length=header.get("max_literal_length", 80),
        stats=InitStats())
    return build_index(snapshot, k=header.get("k", 40_000))
