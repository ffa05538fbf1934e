"""N-Triples reader/writer (one `.`-terminated triple per line)."""
from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Union

from ..errors import ParseError
from .store import TripleStore
from .terms import Literal, Triple, Uri

_URI = r"<([^<>\s]*)>"
_STRING = r'"((?:[^"\\]|\\.)*)"'
_OBJECT = rf"(?:{_URI}|{_STRING}(?:@([A-Za-z][A-Za-z0-9-]*)|\^\^{_URI})?)"
_LINE = re.compile(rf"^{_URI}\s+{_URI}\s+{_OBJECT}\s*\.$")

_UNESCAPE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")
_SIMPLE = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\", "'": "'"}


def unescape(raw: str) -> str:
    def sub(m: re.Match) -> str:
        body = m.group(1)
        if body[0] in "uU":
            return chr(int(body[1:], 16))
        if body in _SIMPLE:
            return _SIMPLE[body]
        raise ValueError(f"bad escape \\{body}")
    return _UNESCAPE.sub(sub, raw)


def parse_line(line: str, lineno: int = 0) -> Triple:
    m = _LINE.match(line.strip())
    if not m:
        raise ParseError(f"not an N-Triples statement: {line.strip()!r}", line=lineno)
    s, p, o_uri, o_lex, o_lang, o_dtype = m.groups()
    try:
        if o_uri is not None:
            obj = Uri(o_uri)
        else:
            obj = Literal(unescape(o_lex), language=o_lang, datatype=o_dtype)
    except ValueError as exc:
        raise ParseError(str(exc), line=lineno) from exc
    return Triple(Uri(s), Uri(p), obj)


def load_ntriples(path: Union[str, Path]) -> TripleStore:
    """Load a store from a file; duplicate statements collapse (set semantics)."""
    triples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            triples.append(parse_line(stripped, lineno))
    return TripleStore(triples)


def loads_ntriples(text: str) -> TripleStore:
    triples = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        triples.append(parse_line(stripped, lineno))
    return TripleStore(triples)


def dump_ntriples(triples: Iterable[Triple], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in sorted(triples, key=str):
            fh.write(f"{t.subject} {t.predicate} {t.object} .\n")
