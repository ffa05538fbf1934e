"""Independent textbook Jaro-Winkler used as a test oracle.

Deliberately written from the definitions rather than by mirroring the
production code: matches are collected as index pairs, transpositions are
counted from the pair lists, and the Winkler boost is applied from a
separately computed common prefix.
"""
from __future__ import annotations


def reference_jaro_winkler(s1: str, s2: str, scale: float = 0.1,
                           max_prefix: int = 4) -> float:
    s1 = s1.casefold()
    s2 = s2.casefold()
    if s1 == s2:
        return 1.0
    if not s1 or not s2:
        return 0.0

    half = max(len(s1), len(s2)) // 2 - 1
    taken = set()
    pairs = []  # (index in s1, index in s2)
    for i, ch in enumerate(s1):
        for j in range(max(0, i - half), min(len(s2), i + half + 1)):
            if j not in taken and s2[j] == ch:
                taken.add(j)
                pairs.append((i, j))
                break
    m = len(pairs)
    if m == 0:
        return 0.0

    ordered_by_s1 = [s1[i] for i, _ in sorted(pairs)]
    ordered_by_s2 = [s2[j] for _, j in sorted(pairs, key=lambda p: p[1])]
    half_transpositions = sum(1 for x, y in zip(ordered_by_s1, ordered_by_s2)
                              if x != y)
    t = half_transpositions / 2

    jaro = (m / len(s1) + m / len(s2) + (m - t) / m) / 3

    prefix = 0
    while (prefix < min(len(s1), len(s2), max_prefix)
           and s1[prefix] == s2[prefix]):
        prefix += 1
    return jaro + prefix * scale * (1 - jaro)
