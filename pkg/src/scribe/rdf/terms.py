"""RDF data model: terms, triples, triple patterns and structured queries."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import UnknownVariableInProjection

log = logging.getLogger(__name__)

XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_SUBCLASSOF = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
OWL_CLASS = "http://www.w3.org/2002/07/owl#Class"


@dataclass(frozen=True)
class Uri:
    value: str

    def __str__(self):
        return f"<{self.value}>"


@dataclass(frozen=True)
class Literal:
    lexical: str
    language: Optional[str] = None
    datatype: Optional[str] = None

    def __str__(self):
        out = '"' + escape_string(self.lexical) + '"'
        if self.language:
            out += f"@{self.language}"
        elif self.datatype:
            out += f"^^<{self.datatype}>"
        return out


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")

    def __str__(self):
        return f"?{self.name}"


Term = Union[Uri, Literal, Variable]

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(s: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in s)


def local_name(uri: str) -> str:
    """Human-readable fragment of a URI (after the last '#' or '/')."""
    for sep in ("#", "/"):
        if sep in uri:
            tail = uri.rsplit(sep, 1)[1]
            if tail:
                return tail
    return uri


def integer_literal(n: int) -> Literal:
    return Literal(str(n), datatype=XSD_INTEGER)


@dataclass(frozen=True)
class Triple:
    subject: Uri
    predicate: Uri
    object: Union[Uri, Literal]

    def __post_init__(self):
        if not isinstance(self.subject, Uri) or not isinstance(self.predicate, Uri):
            raise ValueError("subject and predicate must be URIs")
        if isinstance(self.object, Variable):
            raise ValueError("a stored triple cannot contain variables")


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        # Only objects can be literals in the RDF model.
        if isinstance(self.subject, Literal) or isinstance(self.predicate, Literal):
            raise ValueError("literals may only appear in object position")

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.predicate, self.object)
                if isinstance(t, Variable)}

    def terms(self):
        return (self.subject, self.predicate, self.object)


# --- filter expressions (subset: isliteral/lang/strlen/str, comparisons, bool ops) ---

@dataclass(frozen=True)
class Constant:
    value: Union[str, int]


@dataclass(frozen=True)
class FuncCall:
    name: str  # isliteral | lang | strlen | str
    arg: "ValueExpr"


ValueExpr = Union[Variable, Constant, FuncCall]


@dataclass(frozen=True)
class Comparison:
    left: ValueExpr
    op: str  # = != < <= > >=
    right: ValueExpr


@dataclass(frozen=True)
class BoolOp:
    op: str  # and | or
    operands: tuple


@dataclass(frozen=True)
class Negation:
    operand: "FilterExpr"


FilterExpr = Union[Comparison, BoolOp, Negation, FuncCall]


@dataclass
class Modifiers:
    distinct: bool = False
    count: Optional[str] = None        # counted variable name, or "*"
    count_alias: Optional[str] = None
    group_by: list[str] = field(default_factory=list)
    order_by: Optional[tuple[str, str]] = None  # (variable, "asc" | "desc")
    limit: Optional[int] = None
    offset: Optional[int] = None

    def is_default(self) -> bool:
        return self == Modifiers()


@dataclass
class StructuredQuery:
    patterns: list[TriplePattern]
    projection: list[str]
    filters: list[FilterExpr] = field(default_factory=list)
    modifiers: Modifiers = field(default_factory=Modifiers)

    def pattern_variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables()
        return out

    def validate(self) -> None:
        """Check invariants; raises for bad projections, warns on disconnection."""
        available = self.pattern_variables()
        if self.modifiers.count is not None:
            available.add(self.modifiers.count_alias or "count")
        for var in self.projection:
            if var not in available:
                raise UnknownVariableInProjection(var)
        if len(self.patterns) > 1 and not self._connected():
            log.warning("query patterns do not share variables; result is a cross product")

    def _connected(self) -> bool:
        groups = [p.variables() or {f"__pattern{i}"} for i, p in enumerate(self.patterns)]
        merged = groups[0]
        pending = groups[1:]
        while pending:
            for i, g in enumerate(pending):
                if g & merged:
                    merged |= g
                    del pending[i]
                    break
            else:
                return False
        return True

    def substitute(self, old: Term, new: Term) -> "StructuredQuery":
        """Copy of this query with exactly one occurrence of `old` replaced."""
        done = False
        patterns = []
        for p in self.patterns:
            terms = list(p.terms())
            if not done:
                for i, t in enumerate(terms):
                    if t == old:
                        terms[i] = new
                        done = True
                        break
            patterns.append(TriplePattern(*terms))
        return StructuredQuery(patterns, list(self.projection),
                               list(self.filters), self.modifiers)


@dataclass
class ResultSet:
    columns: list[str]
    rows: list[dict[str, Term]]
    truncated: bool = False

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list[Term]:
        return [row[name] for row in self.rows if name in row]

    def as_multiset(self) -> dict:
        """Order-insensitive view used by tests and result deduplication."""
        counts: dict = {}
        for row in self.rows:
            key = row_key(row)
            counts[key] = counts.get(key, 0) + 1
        return counts


def row_key(row: dict[str, Term]) -> tuple:
    return tuple(sorted((var, str(term)) for var, term in row.items()))
