"""Alternative query terms: lexicon-aware predicate swaps and
similarity-matched literal swaps, executed and kept only when they
actually return answers.

Every element of every triple pattern is examined once. Predicates go
through the lexicon first and are then matched against the cached
predicate set by Jaro-Winkler score; literals are matched against the
index, scanning tree literals plus the bins whose length lies within
[len(l) - alpha, len(l) + beta]. One candidate query is built per
alternative (single-term substitution), candidates are executed through
the federated executor, and the best-scoring answered ones survive.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from .completion import ScanPool
from .errors import ScribeError
from .federation import Registry, prefetch
from .literal_index import LiteralIndex
from .rdf import Literal, ResultSet, StructuredQuery, Term, TriplePattern, Uri, Variable, local_name
from .rdf.endpoints import execute_remote
from .similarity import DEFAULT_JW, JwParams, Lexicon, jaro_winkler

log = logging.getLogger(__name__)

LEXICON_THEN_JW = "lexiconThenJw"
DIRECT_JW = "directJw"


@dataclass(frozen=True)
class WindowParams:
    alpha: int = 2
    beta: int = 3

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")

    def bounds(self, length: int) -> tuple[int, int]:
        return max(0, length - self.alpha), length + self.beta


@dataclass(frozen=True)
class TermAlternative:
    original: Term
    replacement: Term
    score: float
    source: str  # LEXICON_THEN_JW or DIRECT_JW


@dataclass
class SuggestedQuery:
    query: StructuredQuery
    change: object               # TermAlternative or a relaxation tree
    answer_count: int
    prefetched: ResultSet

    def __post_init__(self):
        if self.answer_count < 1:
            raise ValueError("only answered queries may be suggested")


@dataclass
class QsmDeps:
    """Everything Algorithm-style suggestion passes need, bundled once."""
    predicates: list[str]                 # cached predicate URIs
    index: LiteralIndex
    registry: Registry
    lexicon: Lexicon = field(default_factory=Lexicon.empty)
    jw: JwParams = DEFAULT_JW
    window: WindowParams = WindowParams()
    pool: Optional[ScanPool] = None
    execute: object = staticmethod(execute_remote)
    candidate_cap: int = 20               # executions per suggestion list
    fan_out: int = 4
    endpoint_ids: Optional[list[str]] = None


def _term_text(term: Union[Term, str]) -> str:
    if isinstance(term, Uri):
        return local_name(term.value)
    if isinstance(term, Literal):
        return term.lexical
    return str(term)


def find_predicate_alternatives(p: Union[Term, str], predicate_set: list[str],
                                lexicon: Lexicon, jw: JwParams = DEFAULT_JW
                                ) -> list[TermAlternative]:
    """Predicates scoring >= threshold against p or any of its verbalizations."""
    base = _term_text(p)
    original_uri = p.value if isinstance(p, Uri) else None
    verbalizations = sorted(lexicon.lexicalize(base))
    out = []
    for candidate in predicate_set:
        if candidate == original_uri:
            continue
        name = local_name(candidate)
        best, via = 0.0, base
        for s in verbalizations:
            score = jaro_winkler(s, name, jw)
            if score > best:
                best, via = score, s
        if best >= jw.threshold:
            source = DIRECT_JW if via == base.casefold() else LEXICON_THEN_JW
            original = p if isinstance(p, (Uri, Literal)) else Uri(str(p))
            out.append(TermAlternative(original=original,
                                       replacement=Uri(candidate),
                                       score=best, source=source))
    out.sort(key=lambda a: (-a.score, a.replacement.value))
    return out


def find_literal_alternatives(l: Union[Term, str], index: LiteralIndex,
                              window: WindowParams = WindowParams(),
                              jw: JwParams = DEFAULT_JW,
                              pool: Optional[ScanPool] = None
                              ) -> list[TermAlternative]:
    """Similar literals from the tree (unwindowed) and the windowed bins."""
    base = _term_text(l)
    low, high = window.bounds(len(base))
    scored: dict[str, float] = {}
    for entry in index.tree_literals:
        score = jaro_winkler(base, entry.display, jw)
        if score >= jw.threshold:
            scored[entry.display] = max(scored.get(entry.display, 0.0), score)

    owns_pool = pool is None
    pool = pool or ScanPool(index, processes=1)
    try:
        for entry, score in pool.jw_scan(base, low, high, jw):
            scored[entry.display] = max(scored.get(entry.display, 0.0), score)
    finally:
        if owns_pool:
            pool.close()

    language = index.language or None
    original = l if isinstance(l, (Uri, Literal)) else Literal(str(l))
    out = [TermAlternative(original=original,
                           replacement=Literal(lex, language=language),
                           score=score, source=DIRECT_JW)
           for lex, score in scored.items() if lex != base]
    out.sort(key=lambda a: (-a.score, a.replacement.lexical))
    return out


def _substitute_at(query: StructuredQuery, pattern_index: int, position: int,
                   replacement: Term) -> Optional[StructuredQuery]:
    patterns = []
    for i, pattern in enumerate(query.patterns):
        if i == pattern_index:
            terms = list(pattern.terms())
            terms[position] = replacement
            try:
                pattern = TriplePattern(*terms)
            except ValueError:
                return None
        patterns.append(pattern)
    return StructuredQuery(patterns, list(query.projection),
                           list(query.filters), query.modifiers)


@dataclass
class _Candidate:
    query: StructuredQuery
    alternative: TermAlternative


def _gather_candidates(query: StructuredQuery, deps: QsmDeps
                       ) -> tuple[list[_Candidate], list[_Candidate]]:
    predicate_candidates: list[_Candidate] = []
    literal_candidates: list[_Candidate] = []
    for i, pattern in enumerate(query.patterns):
        for position, term in enumerate(pattern.terms()):
            if isinstance(term, Variable):
                continue
            if position == 1:
                alternatives = find_predicate_alternatives(
                    term, deps.predicates, deps.lexicon, deps.jw)
                bucket = predicate_candidates
            else:
                if position == 0:
                    # a literal cannot stand in subject position, so there
                    # is nothing valid to substitute here
                    continue
                alternatives = find_literal_alternatives(
                    term, deps.index, deps.window, deps.jw, deps.pool)
                bucket = literal_candidates
            for alt in alternatives:
                candidate = _substitute_at(query, i, position, alt.replacement)
                if candidate is not None:
                    bucket.append(_Candidate(candidate, alt))
    predicate_candidates.sort(key=lambda c: -c.alternative.score)
    literal_candidates.sort(key=lambda c: -c.alternative.score)
    return predicate_candidates, literal_candidates


def _answered(candidates: list[_Candidate], deps: QsmDeps, keep: int
              ) -> list[SuggestedQuery]:
    candidates = candidates[: deps.candidate_cap]
    results = prefetch(deps.registry, [c.query for c in candidates],
                       endpoint_ids=deps.endpoint_ids, fan_out=deps.fan_out,
                       execute=deps.execute)
    out = []
    for candidate, result in zip(candidates, results):
        if result is not None and result.answer_count >= 1:
            out.append(SuggestedQuery(query=candidate.query,
                                      change=candidate.alternative,
                                      answer_count=result.answer_count,
                                      prefetched=result.rows))
            if len(out) == keep:
                break
    return out


def suggest_term_queries(query: StructuredQuery, deps: QsmDeps,
                         k: int = 10) -> list[SuggestedQuery]:
    """Up to ceil(k/2) answered predicate swaps plus floor(k/2) literal swaps."""
    if k < 1:
        raise ScribeError("k must be >= 1")
    predicate_candidates, literal_candidates = _gather_candidates(query, deps)
    keep_predicates = (k + 1) // 2
    keep_literals = k // 2
    suggestions = _answered(predicate_candidates, deps, keep_predicates)
    suggestions += _answered(literal_candidates, deps, keep_literals)
    return suggestions
