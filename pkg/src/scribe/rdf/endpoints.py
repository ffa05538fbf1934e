"""Endpoint descriptors and the SPARQL-protocol client.

A remote endpoint is queried over HTTP (GET, or POST for long queries)
asking for ``application/sparql-results+json``. A local endpoint wraps an
in-memory store and evaluates directly; both go through
:func:`execute_remote` so callers never branch on the kind.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import requests

from ..errors import MalformedResponse, NetworkError, QueryTimeout
from .store import TripleStore, evaluate
from .terms import Literal, ResultSet, Term, Uri

_MAX_GET_QUERY = 1500


@dataclass
class Remote:
    url: str


@dataclass
class Local:
    store: TripleStore


@dataclass
class Endpoint:
    id: str
    kind: Union[Remote, Local]
    timeout_ms: int = 30_000
    max_init_queries: Optional[int] = None

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")


def execute_remote(endpoint: Endpoint, sparql_text: str) -> ResultSet:
    """Run a query against the endpoint.

    Raises QueryTimeout after ``timeout_ms`` (a normal outcome for the
    initializer's descent logic; never retried here), NetworkError for
    unreachable hosts, MalformedResponse for non-result payloads.
    """
    if isinstance(endpoint.kind, Local):
        from .sparql import parse
        return evaluate(endpoint.kind.store, parse(sparql_text))

    url = endpoint.kind.url
    timeout_s = endpoint.timeout_ms / 1000.0
    headers = {"Accept": "application/sparql-results+json"}
    try:
        if len(sparql_text) <= _MAX_GET_QUERY:
            resp = requests.get(url, params={"query": sparql_text},
                                headers=headers, timeout=timeout_s)
        else:
            resp = requests.post(url, data={"query": sparql_text},
                                 headers=headers, timeout=timeout_s)
    except requests.exceptions.Timeout as exc:
        raise QueryTimeout(str(exc)) from exc
    except requests.exceptions.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    if resp.status_code in (503, 504):
        raise QueryTimeout(f"endpoint returned {resp.status_code}")
    if resp.status_code != 200:
        raise NetworkError(f"endpoint returned {resp.status_code}: {resp.text[:200]}")
    try:
        return results_from_json(resp.json())
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedResponse(str(exc)) from exc


# --- SPARQL JSON results format ----------------------------------------------

def results_from_json(payload: dict) -> ResultSet:
    columns = list(payload["head"]["vars"])
    rows = []
    for binding in payload["results"]["bindings"]:
        row: dict[str, Term] = {}
        for var, cell in binding.items():
            row[var] = _term_from_cell(cell)
        rows.append(row)
    return ResultSet(columns=columns, rows=rows,
                     truncated=bool(payload.get("truncated", False)))


def _term_from_cell(cell: dict) -> Term:
    kind = cell["type"]
    if kind == "uri":
        return Uri(cell["value"])
    if kind in ("literal", "typed-literal"):
        return Literal(cell["value"], language=cell.get("xml:lang"),
                       datatype=cell.get("datatype"))
    raise MalformedResponse(f"unsupported binding type {kind!r}")


def results_to_json(result: ResultSet) -> str:
    bindings = []
    for row in result.rows:
        binding = {}
        for var, term in row.items():
            if isinstance(term, Uri):
                binding[var] = {"type": "uri", "value": term.value}
            else:
                cell = {"type": "literal", "value": term.lexical}
                if term.language:
                    cell["xml:lang"] = term.language
                if term.datatype:
                    cell["datatype"] = term.datatype
                binding[var] = cell
        bindings.append(binding)
    payload = {"head": {"vars": result.columns},
               "results": {"bindings": bindings}}
    if result.truncated:
        payload["truncated"] = True
    return json.dumps(payload, ensure_ascii=False, sort_keys=True)
