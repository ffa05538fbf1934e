"""In-memory triple store with a SPARQL-subset evaluator.

The store is immutable once loaded and safe for concurrent readers. The
evaluator covers basic graph patterns, FILTER over
isliteral/lang/strlen/str and comparisons, DISTINCT, COUNT, GROUP BY,
ORDER BY and LIMIT/OFFSET.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Optional

from ..errors import UnsupportedFeature
from .terms import (
    BoolOp,
    Comparison,
    Constant,
    FilterExpr,
    FuncCall,
    Literal,
    Modifiers,
    Negation,
    ResultSet,
    StructuredQuery,
    Term,
    Triple,
    TriplePattern,
    Uri,
    Variable,
    integer_literal,
    row_key,
)


class TripleStore:
    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set(triples)
        self._by_s: dict[Uri, set[Triple]] = defaultdict(set)
        self._by_p: dict[Uri, set[Triple]] = defaultdict(set)
        self._by_o: dict[Term, set[Triple]] = defaultdict(set)
        for t in self._triples:
            self._by_s[t.subject].add(t)
            self._by_p[t.predicate].add(t)
            self._by_o[t.object].add(t)

    def __len__(self):
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def match(self, s: Optional[Uri] = None, p: Optional[Uri] = None,
              o: Optional[Term] = None) -> Iterator[Triple]:
        """All triples matching the given constants (None = wildcard)."""
        candidates: Optional[set[Triple]] = None
        for bound, idx in ((s, self._by_s), (p, self._by_p), (o, self._by_o)):
            if bound is None:
                continue
            found = idx.get(bound, set())
            candidates = found if candidates is None else (candidates & found)
            if not candidates:
                return iter(())
        if candidates is None:
            candidates = self._triples
        return iter(candidates)


# --- evaluation -------------------------------------------------------------

def evaluate(store: TripleStore, query: StructuredQuery) -> ResultSet:
    """All bindings whose substitution turns every pattern into a stored triple.

    Pipeline: pattern join -> filters -> group/count -> projection ->
    distinct -> order -> offset/limit.
    """
    query.validate()
    rows = _join_patterns(store, query.patterns)
    for f in query.filters:
        rows = [r for r in rows if _filter_truth(f, r)]

    mods = query.modifiers
    if mods.count is not None:
        rows = _aggregate(rows, mods)
        columns = list(mods.group_by)
        columns.append(mods.count_alias or "count")
    elif mods.group_by:
        # grouping without an aggregate keeps one row per distinct key
        columns = list(mods.group_by)
        seen: dict[tuple, dict] = {}
        for r in rows:
            projected = {v: r[v] for v in columns if v in r}
            seen.setdefault(row_key(projected), projected)
        rows = list(seen.values())
    else:
        columns = list(query.projection) or sorted(query.pattern_variables())
        rows = [{v: r[v] for v in columns if v in r} for r in rows]

    if query.projection:
        keep = [c for c in columns if c in query.projection]
        if keep:
            columns = keep
            rows = [{v: r[v] for v in columns if v in r} for r in rows]

    if mods.distinct:
        seen = set()
        unique = []
        for r in rows:
            key = row_key(r)
            if key not in seen:
                seen.add(key)
                unique.append(r)
        rows = unique

    if mods.order_by is not None:
        var, direction = mods.order_by
        rows.sort(key=lambda r: (_sort_key(r.get(var)), row_key(r)),
                  reverse=(direction == "desc"))
    else:
        # Unordered results compare as multisets; sorting here keeps
        # pagination and serialization deterministic.
        rows.sort(key=row_key)

    if mods.offset:
        rows = rows[mods.offset:]
    if mods.limit is not None:
        rows = rows[: mods.limit]
    return ResultSet(columns=columns, rows=rows)


def _join_patterns(store: TripleStore,
                   patterns: list[TriplePattern]) -> list[dict[str, Term]]:
    bindings: list[dict[str, Term]] = [{}]
    for pattern in patterns:
        extended: list[dict[str, Term]] = []
        for binding in bindings:
            s, p, o = (_resolve(t, binding) for t in pattern.terms())
            for triple in store.match(
                s if not isinstance(s, Variable) else None,
                p if not isinstance(p, Variable) else None,
                o if not isinstance(o, Variable) else None,
            ):
                new = _extend(binding, pattern, triple)
                if new is not None:
                    extended.append(new)
        bindings = extended
        if not bindings:
            break
    return bindings


def _resolve(term: Term, binding: dict[str, Term]) -> Term:
    if isinstance(term, Variable):
        return binding.get(term.name, term)
    return term


def _extend(binding, pattern: TriplePattern, triple: Triple):
    new = dict(binding)
    for term, value in zip(pattern.terms(), (triple.subject, triple.predicate, triple.object)):
        if isinstance(term, Variable):
            bound = new.get(term.name)
            if bound is not None and bound != value:
                return None
            new[term.name] = value
    return new


def _aggregate(rows, mods: Modifiers):
    groups: dict[tuple, list] = defaultdict(list)
    for r in rows:
        key = tuple(str(r.get(v)) for v in mods.group_by)
        groups[key].append(r)
    alias = mods.count_alias or "count"
    out = []
    for key in sorted(groups):
        members = groups[key]
        if mods.count == "*":
            n = len(members)
        else:
            # Counts distinct bindings, matching the set-builder reading of
            # the significance definition.
            n = len({str(m[mods.count]) for m in members if mods.count in m})
        row = {v: members[0][v] for v in mods.group_by if v in members[0]}
        row[alias] = integer_literal(n)
        out.append(row)
    return out


def _sort_key(term: Optional[Term]):
    if term is None:
        return (0, "")
    if isinstance(term, Literal):
        try:
            return (1, float(term.lexical))
        except ValueError:
            return (2, term.lexical)
    return (2, term.value if isinstance(term, Uri) else str(term))


# --- filter evaluation ------------------------------------------------------

class _FilterTypeError(Exception):
    """SPARQL semantics: an erroring filter expression selects nothing."""


def _filter_truth(expr: FilterExpr, row: dict[str, Term]) -> bool:
    try:
        return bool(_filter_eval(expr, row))
    except _FilterTypeError:
        return False


def _filter_eval(expr, row):
    if isinstance(expr, BoolOp):
        results = (_filter_truth(op, row) for op in expr.operands)
        return any(results) if expr.op == "or" else all(results)
    if isinstance(expr, Negation):
        return not _filter_truth(expr.operand, row)
    if isinstance(expr, Comparison):
        left = _value_eval(expr.left, row)
        right = _value_eval(expr.right, row)
        return _compare(expr.op, left, right)
    if isinstance(expr, FuncCall):
        value = _value_eval(expr, row)
        if isinstance(value, bool):
            return value
        raise _FilterTypeError(expr.name)
    raise UnsupportedFeature(f"filter expression {expr!r}")


def _value_eval(expr, row):
    if isinstance(expr, Variable):
        try:
            return row[expr.name]
        except KeyError:
            raise _FilterTypeError(expr.name) from None
    if isinstance(expr, Constant):
        return expr.value
    if isinstance(expr, FuncCall):
        return _apply_func(expr.name, _value_eval(expr.arg, row))
    raise UnsupportedFeature(f"value expression {expr!r}")


def _apply_func(name: str, value):
    if name == "isliteral":
        return isinstance(value, Literal)
    if name == "lang":
        if isinstance(value, Literal):
            return value.language or ""
        raise _FilterTypeError("lang() of a non-literal")
    if name == "str":
        if isinstance(value, Literal):
            return value.lexical
        if isinstance(value, Uri):
            return value.value
        return str(value)
    if name == "strlen":
        if isinstance(value, Literal):
            return len(value.lexical)
        if isinstance(value, str):
            return len(value)
        raise _FilterTypeError("strlen() of a non-string")
    raise UnsupportedFeature(f"function {name}")


def _compare(op: str, left, right) -> bool:
    left = _comparable(left)
    right = _comparable(right)
    if type(left) is not type(right):
        if isinstance(left, (int, float)) and isinstance(right, (int, float)):
            pass
        else:
            raise _FilterTypeError(f"{op} on mixed types")
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    raise UnsupportedFeature(f"operator {op}")


def _comparable(value):
    if isinstance(value, Literal):
        try:
            return int(value.lexical)
        except ValueError:
            return value.lexical
    if isinstance(value, Uri):
        return value.value
    return value
