"""SPARQL-subset text layer: recursive-descent parser and serializer.

Supported: PREFIX declarations, SELECT [DISTINCT], COUNT aggregates,
basic graph patterns, FILTER with isliteral/lang/strlen/str and
comparison/boolean operators, GROUP BY, ORDER BY, LIMIT, OFFSET.
`serialize(parse(text))` and `parse(serialize(query))` are stable up to
variable naming.
"""
from __future__ import annotations

import re
from typing import Optional

from ..errors import ParseError, UnsupportedFeature
from .ntriples import unescape
from .terms import (
    RDF_TYPE,
    BoolOp,
    Comparison,
    Constant,
    FilterExpr,
    FuncCall,
    Literal,
    Modifiers,
    Negation,
    StructuredQuery,
    Term,
    TriplePattern,
    Uri,
    Variable,
)

_TOKEN = re.compile(
    r"""
      (?P<ws>\s+|\#[^\n]*)
    | (?P<iri><[^<>\s]*>)
    | (?P<string>"(?:[^"\\]|\\.)*")
    | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
    | (?P<number>-?\d+(?:\.\d+)?)
    | (?P<pname>[A-Za-z_][A-Za-z0-9_.-]*:[A-Za-z0-9_.%-]*)
    | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op><=|>=|!=|&&|\|\||[{}().;,*=<>!@^])
    """,
    re.VERBOSE,
)

_FUNCTIONS = {"isliteral", "lang", "strlen", "str"}
_UNSUPPORTED = {"optional", "union", "minus", "construct", "ask", "describe",
                "insert", "delete", "service", "values", "bind", "exists"}


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items: list[tuple[str, str, int]] = []
        pos = 0
        line = 1
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line=line)
            line += text.count("\n", pos, m.end())
            if m.lastgroup != "ws":
                self.items.append((m.lastgroup, m.group(), line))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.items[self.i] if self.i < len(self.items) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of query")
        self.i += 1
        return tok

    def accept_word(self, *words: str) -> Optional[str]:
        tok = self.peek()
        if tok and tok[0] == "word" and tok[1].lower() in words:
            self.i += 1
            return tok[1].lower()
        return None

    def accept_op(self, op: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == op:
            self.i += 1
            return True
        return False

    def expect_op(self, op: str) -> None:
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}, found {tok[1]!r}", line=tok[2])

    def expect_word(self, word: str) -> None:
        tok = self.next()
        if tok[0] != "word" or tok[1].lower() != word:
            raise ParseError(f"expected {word.upper()}, found {tok[1]!r}", line=tok[2])


def parse(text: str) -> StructuredQuery:
    return _Parser(text).parse_query()


class _Parser:
    def __init__(self, text: str):
        self.tokens = _Tokens(text)
        self.prefixes: dict[str, str] = {}

    def parse_query(self) -> StructuredQuery:
        t = self.tokens
        while t.accept_word("prefix"):
            name_tok = t.next()
            if name_tok[0] != "pname" or not name_tok[1].endswith(":"):
                raise ParseError("expected a prefix name", line=name_tok[2])
            iri_tok = t.next()
            if iri_tok[0] != "iri":
                raise ParseError("expected an IRI after prefix name", line=iri_tok[2])
            self.prefixes[name_tok[1][:-1]] = iri_tok[1][1:-1]

        word = t.accept_word("select", *_UNSUPPORTED)
        if word != "select":
            raise UnsupportedFeature(f"only SELECT queries are supported, not {word}")
        mods = Modifiers()
        if t.accept_word("distinct"):
            mods.distinct = True

        projection = self._parse_projection(mods)
        t.accept_word("where")
        patterns, filters = self._parse_group()
        self._parse_solution_modifiers(mods)

        if mods.count is not None:
            alias = mods.count_alias or "count"
            if alias not in projection:
                projection.append(alias)
        query = StructuredQuery(patterns=patterns, projection=projection,
                                filters=filters, modifiers=mods)
        query.validate()
        return query

    def _parse_projection(self, mods: Modifiers) -> list[str]:
        t = self.tokens
        projection: list[str] = []
        while True:
            tok = t.peek()
            if tok is None:
                raise ParseError("unexpected end of query in SELECT clause")
            kind, value, line = tok
            if kind == "op" and value == "*":
                t.next()
                if projection:
                    raise ParseError("'*' cannot be mixed with named variables", line=line)
                return []
            if kind == "var":
                t.next()
                projection.append(value[1:])
                continue
            if kind == "op" and value == "(":
                t.next()
                self._parse_count(mods, aliased=True)
                continue
            if kind == "word" and value.lower() == "count":
                t.next()
                self._parse_count(mods, aliased=False)
                continue
            break
        if not projection and mods.count is None:
            raise ParseError("empty SELECT clause")
        return projection

    def _parse_count(self, mods: Modifiers, aliased: bool) -> None:
        t = self.tokens
        if aliased:
            t.expect_word("count")
        if mods.count is not None:
            raise UnsupportedFeature("multiple aggregates in one query")
        t.expect_op("(")
        tok = t.next()
        if tok[0] == "var":
            mods.count = tok[1][1:]
        elif tok[0] == "op" and tok[1] == "*":
            mods.count = "*"
        else:
            raise ParseError(f"expected a variable or '*' in COUNT, found {tok[1]!r}",
                             line=tok[2])
        t.expect_op(")")
        if aliased:
            if t.accept_word("as"):
                var_tok = t.next()
                if var_tok[0] != "var":
                    raise ParseError("expected a variable after AS", line=var_tok[2])
                mods.count_alias = var_tok[1][1:]
            t.expect_op(")")

    def _parse_group(self) -> tuple[list[TriplePattern], list[FilterExpr]]:
        t = self.tokens
        t.expect_op("{")
        patterns: list[TriplePattern] = []
        filters: list[FilterExpr] = []
        while True:
            tok = t.peek()
            if tok is None:
                raise ParseError("unterminated group pattern")
            if tok[0] == "op" and tok[1] == "}":
                t.next()
                return patterns, filters
            if tok[0] == "word" and tok[1].lower() in _UNSUPPORTED:
                raise UnsupportedFeature(tok[1].upper())
            if tok[0] == "word" and tok[1].lower() == "filter":
                t.next()
                t.expect_op("(")
                filters.append(self._parse_or())
                t.expect_op(")")
            else:
                s = self._parse_term(allow_literal=False)
                p = self._parse_term(allow_literal=False)
                o = self._parse_term(allow_literal=True)
                patterns.append(TriplePattern(s, p, o))
            t.accept_op(".")

    def _parse_term(self, allow_literal: bool) -> Term:
        tok = self.tokens.next()
        kind, value, line = tok
        if kind == "var":
            return Variable(value[1:])
        if kind == "iri":
            return Uri(value[1:-1])
        if kind == "pname":
            return Uri(self._expand(value, line))
        if kind == "word" and value == "a":
            return Uri(RDF_TYPE)
        if kind == "string":
            if not allow_literal:
                raise ParseError("literal outside object position", line=line)
            return self._finish_literal(value)
        raise ParseError(f"expected a term, found {value!r}", line=line)

    def _finish_literal(self, raw: str) -> Literal:
        t = self.tokens
        lexical = unescape(raw[1:-1])
        tok = t.peek()
        if tok and tok[0] == "op" and tok[1] == "@":
            t.next()
            lang_tok = t.next()
            if lang_tok[0] != "word":
                raise ParseError("expected a language tag", line=lang_tok[2])
            return Literal(lexical, language=lang_tok[1])
        if tok and tok[0] == "op" and tok[1] == "^":
            t.next()
            t.expect_op("^")
            dt = t.next()
            if dt[0] == "iri":
                return Literal(lexical, datatype=dt[1][1:-1])
            if dt[0] == "pname":
                return Literal(lexical, datatype=self._expand(dt[1], dt[2]))
            raise ParseError("expected a datatype IRI", line=dt[2])
        return Literal(lexical)

    def _expand(self, pname: str, line: int) -> str:
        prefix, local = pname.split(":", 1)
        if prefix == "rdf" and local == "type":
            return RDF_TYPE
        if prefix not in self.prefixes:
            raise ParseError(f"undeclared prefix {prefix!r}", line=line)
        return self.prefixes[prefix] + local

    # filter expressions ------------------------------------------------

    def _parse_or(self) -> FilterExpr:
        operands = [self._parse_and()]
        while self.tokens.accept_op("||"):
            operands.append(self._parse_and())
        return operands[0] if len(operands) == 1 else BoolOp("or", tuple(operands))

    def _parse_and(self) -> FilterExpr:
        operands = [self._parse_unary()]
        while self.tokens.accept_op("&&"):
            operands.append(self._parse_unary())
        return operands[0] if len(operands) == 1 else BoolOp("and", tuple(operands))

    def _parse_unary(self) -> FilterExpr:
        if self.tokens.accept_op("!"):
            return Negation(self._parse_unary())
        left = self._parse_value()
        tok = self.tokens.peek()
        if tok and tok[0] == "op" and tok[1] in ("=", "!=", "<", "<=", ">", ">="):
            self.tokens.next()
            right = self._parse_value()
            return Comparison(left, tok[1], right)
        if isinstance(left, FuncCall):
            return left
        raise ParseError("expected a comparison or boolean function",
                         line=tok[2] if tok else None)

    def _parse_value(self):
        t = self.tokens
        tok = t.next()
        kind, value, line = tok
        if kind == "var":
            return Variable(value[1:])
        if kind == "string":
            lit = self._finish_literal(value)
            if lit.language or lit.datatype:
                raise UnsupportedFeature("typed literal inside FILTER")
            return Constant(lit.lexical)
        if kind == "number":
            return Constant(int(value) if "." not in value else float(value))
        if kind == "op" and value == "(":
            inner = self._parse_or()
            t.expect_op(")")
            return inner
        if kind == "word" and value.lower() in _FUNCTIONS:
            t.expect_op("(")
            arg = self._parse_value()
            t.expect_op(")")
            return FuncCall(value.lower(), arg)
        if kind == "word":
            raise UnsupportedFeature(f"function {value}")
        raise ParseError(f"unexpected token {value!r} in filter", line=line)

    def _parse_solution_modifiers(self, mods: Modifiers) -> None:
        t = self.tokens
        while True:
            if t.accept_word("group"):
                t.expect_word("by")
                while True:
                    tok = t.peek()
                    if tok and tok[0] == "var":
                        t.next()
                        mods.group_by.append(tok[1][1:])
                    else:
                        break
                if not mods.group_by:
                    raise ParseError("empty GROUP BY")
            elif t.accept_word("order"):
                t.expect_word("by")
                direction = t.accept_word("asc", "desc") or "asc"
                tok = t.peek()
                if tok and tok[0] == "var":
                    t.next()
                    mods.order_by = (tok[1][1:], direction)
                else:
                    t.expect_op("(")
                    var_tok = t.next()
                    if var_tok[0] != "var":
                        raise ParseError("expected a variable in ORDER BY",
                                         line=var_tok[2])
                    t.expect_op(")")
                    mods.order_by = (var_tok[1][1:], direction)
            elif t.accept_word("limit"):
                mods.limit = self._expect_int()
            elif t.accept_word("offset"):
                mods.offset = self._expect_int()
            else:
                tok = t.peek()
                if tok is not None:
                    raise ParseError(f"unexpected trailing token {tok[1]!r}", line=tok[2])
                return

    def _expect_int(self) -> int:
        tok = self.tokens.next()
        if tok[0] != "number" or "." in tok[1]:
            raise ParseError(f"expected an integer, found {tok[1]!r}", line=tok[2])
        return int(tok[1])


# --- serialization ----------------------------------------------------------

def serialize(query: StructuredQuery) -> str:
    """Emit the query as SPARQL text that our own parser reads back."""
    query.validate()
    mods = query.modifiers
    parts = ["SELECT"]
    if mods.distinct:
        parts.append("DISTINCT")
    alias = mods.count_alias or ("count" if mods.count is not None else None)
    for var in query.projection:
        if var == alias:
            continue
        parts.append(f"?{var}")
    if mods.count is not None:
        counted = "*" if mods.count == "*" else f"?{mods.count}"
        if mods.count_alias:
            parts.append(f"(COUNT({counted}) AS ?{mods.count_alias})")
        else:
            parts.append(f"COUNT({counted})")
    if not query.projection and mods.count is None:
        parts.append("*")

    body = []
    for p in query.patterns:
        body.append(f"  {_term_text(p.subject)} {_term_text(p.predicate)} "
                    f"{_term_text(p.object)} .")
    for f in query.filters:
        body.append(f"  FILTER ({_filter_text(f)}) .")

    lines = [" ".join(parts) + " WHERE {"] + body + ["}"]
    if mods.group_by:
        lines.append("GROUP BY " + " ".join(f"?{v}" for v in mods.group_by))
    if mods.order_by:
        var, direction = mods.order_by
        lines.append(f"ORDER BY {direction.upper()}(?{var})")
    if mods.limit is not None:
        lines.append(f"LIMIT {mods.limit}")
    if mods.offset is not None:
        lines.append(f"OFFSET {mods.offset}")
    return "\n".join(lines)


def _term_text(term: Term) -> str:
    return str(term)


def _filter_text(expr) -> str:
    if isinstance(expr, BoolOp):
        sep = " && " if expr.op == "and" else " || "
        return sep.join(_operand_text(op) for op in expr.operands)
    if isinstance(expr, Negation):
        return f"!({_filter_text(expr.operand)})"
    if isinstance(expr, Comparison):
        return f"{_value_text(expr.left)} {expr.op} {_value_text(expr.right)}"
    if isinstance(expr, FuncCall):
        return _value_text(expr)
    raise UnsupportedFeature(f"cannot serialize {expr!r}")


def _operand_text(expr) -> str:
    if isinstance(expr, BoolOp):
        return f"({_filter_text(expr)})"
    return _filter_text(expr)


def _value_text(expr) -> str:
    if isinstance(expr, Variable):
        return str(expr)
    if isinstance(expr, Constant):
        if isinstance(expr.value, str):
            return str(Literal(expr.value))
        return str(expr.value)
    if isinstance(expr, FuncCall):
        return f"{expr.name}({_value_text(expr.arg)})"
    if isinstance(expr, (Comparison, BoolOp, Negation)):
        return f"({_filter_text(expr)})"
    raise UnsupportedFeature(f"cannot serialize {expr!r}")
