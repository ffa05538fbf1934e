"""Brute-force oracles for the initializer, computed by linear scans."""
from __future__ import annotations

import re

from scribe.rdf import Literal, TripleStore, Uri, evaluate, parse
from scribe.rdf.terms import RDF_TYPE

from scribe.errors import QueryTimeout


def filtered_literals(store: TripleStore, lang: str = "en",
                      max_len: int = 80) -> set[str]:
    return {t.object.lexical for t in store
            if isinstance(t.object, Literal)
            and t.object.language == lang and len(t.object.lexical) < max_len}


def predicate_counts(store: TripleStore) -> dict[str, int]:
    out: dict[str, int] = {}
    for t in store:
        out[t.predicate.value] = out.get(t.predicate.value, 0) + 1
    return out


def literal_predicates_passing_probe(store: TripleStore, lang="en",
                                     max_len=80) -> set[str]:
    kept = set()
    for t in store:
        o = t.object
        if (isinstance(o, Literal) and o.language == lang
                and len(o.lexical) < max_len):
            kept.add(t.predicate.value)
    return kept


def significance(store: TripleStore, lexical: str) -> int:
    """|{s : (s,p1,o) and (o,p2,l)}| by scanning all two-hop paths."""
    subjects = set()
    for hop2 in store:
        if isinstance(hop2.object, Literal) and hop2.object.lexical == lexical:
            for hop1 in store.match(o=hop2.subject):
                subjects.add(hop1.subject)
    return len(subjects)


_CLASS_IN_QUERY = re.compile(
    re.escape(f"<{RDF_TYPE}> <") + r"([^>]*)>")


def class_size_executor(store: TripleStore, threshold: int):
    """Executor that times out typed queries over classes above `threshold`.

    Mimics an endpoint whose timeout behavior is a function of class size.
    """
    def execute(endpoint, text):
        m = _CLASS_IN_QUERY.search(text)
        if m:
            class_uri = Uri(m.group(1))
            population = sum(1 for _ in store.match(p=Uri(RDF_TYPE), o=class_uri))
            if population > threshold:
                raise QueryTimeout(f"scripted: {class_uri.value} has "
                                   f"{population} instances")
        return evaluate(store, parse(text))
    return execute


def rule_executor(store: TripleStore, should_timeout):
    def execute(endpoint, text):
        if should_timeout(text):
            raise QueryTimeout("scripted")
        return evaluate(store, parse(text))
    return execute
