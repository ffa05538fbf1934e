"""Jaro-Winkler string similarity and the pluggable verbalization lexicon.

Scores are computed on case-folded strings so the matching policy agrees
with the literal index. The lexicon maps dataset terms to natural-language
verbalizations in both directions ("wife" <-> "spouse").
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Union


@dataclass(frozen=True)
class JwParams:
    prefix_scale: float = 0.1
    max_prefix: int = 4
    threshold: float = 0.7

    def __post_init__(self):
        if not 0 < self.prefix_scale <= 0.25:
            raise ValueError("prefix_scale must be in (0, 0.25]")
        if not 0 < self.threshold <= 1:
            raise ValueError("threshold must be in (0, 1]")


DEFAULT_JW = JwParams()


def jaro_winkler(a: str, b: str, params: JwParams = DEFAULT_JW) -> float:
    """Jaro similarity boosted by the length of the shared prefix.

    Two empty strings score 1.0 by convention; one empty string scores 0.0.
    """
    a = a.casefold()
    b = b.casefold()
    if a == b:
        return 1.0
    j = _jaro(a, b)
    if j == 0.0:
        return 0.0
    prefix = 0
    for ca, cb in zip(a, b):
        if ca != cb or prefix >= params.max_prefix:
            break
        prefix += 1
    return j + prefix * params.prefix_scale * (1.0 - j)


def _jaro(a: str, b: str) -> float:
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    window = max(la, lb) // 2 - 1
    matched_a = [False] * la
    matched_b = [False] * lb
    m = 0
    for i, ca in enumerate(a):
        lo = max(0, i - window)
        hi = min(lb, i + window + 1)
        for k in range(lo, hi):
            if not matched_b[k] and b[k] == ca:
                matched_a[i] = matched_b[k] = True
                m += 1
                break
    if m == 0:
        return 0.0
    b_seq = [b[k] for k in range(lb) if matched_b[k]]
    transposed = 0
    k = 0
    for i in range(la):
        if matched_a[i]:
            if a[i] != b_seq[k]:
                transposed += 1
            k += 1
    t = transposed / 2.0
    return (m / la + m / lb + (m - t) / m) / 3.0


class Lexicon:
    """Term verbalizations with an identity fallback for unknown terms."""

    def __init__(self, mapping: dict[str, list[str]]):
        self._forward: dict[str, set[str]] = {}
        self._inverse: dict[str, set[str]] = {}
        for term, verbalizations in mapping.items():
            key = term.casefold()
            self._forward.setdefault(key, set()).update(
                v.casefold() for v in verbalizations)
            for v in verbalizations:
                self._inverse.setdefault(v.casefold(), set()).add(key)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    @classmethod
    def bundled(cls) -> "Lexicon":
        text = (resources.files("scribe") / "data" / "lexicon.json").read_text("utf-8")
        return cls(json.loads(text))

    @classmethod
    def empty(cls) -> "Lexicon":
        return cls({})

    def lexicalize(self, term: str) -> set[str]:
        key = term.casefold()
        out = {key}
        out |= self._forward.get(key, set())
        out |= self._inverse.get(key, set())
        return out
