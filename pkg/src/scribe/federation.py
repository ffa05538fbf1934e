"""Minimal federated execution: broadcast a query, union the answers.

Each registered endpoint evaluates the whole query; rows are merged
with duplicate elimination. Cross-endpoint join decomposition is out of
scope. Also home to the prefetch helper that executes candidate queries
so accepted suggestions never hit an endpoint again.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

from .errors import AllEndpointsFailed, EndpointError, QueryTimeout
from .rdf import Endpoint, ResultSet, StructuredQuery, execute_remote, serialize
from .rdf.terms import row_key

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_MS = 30_000
PREFETCH_ROW_CAP = 1000


@dataclass
class Registry:
    endpoints: dict[str, Endpoint] = field(default_factory=dict)

    def register(self, endpoint: Endpoint) -> None:
        self.endpoints[endpoint.id] = endpoint

    def unregister(self, endpoint_id: str) -> None:
        self.endpoints.pop(endpoint_id, None)

    def get(self, endpoint_id: str) -> Endpoint:
        return self.endpoints[endpoint_id]

    def selected(self, ids: Optional[Sequence[str]] = None) -> list[Endpoint]:
        if ids is None:
            return list(self.endpoints.values())
        return [self.endpoints[i] for i in ids]


def execute_federated(registry: Registry,
                      query: Union[StructuredQuery, str],
                      timeout_ms: int = DEFAULT_TIMEOUT_MS,
                      endpoint_ids: Optional[Sequence[str]] = None,
                      execute=execute_remote) -> ResultSet:
    """Broadcast to every selected endpoint and union the rows.

    `truncated` is set when any endpoint timed out; AllEndpointsFailed is
    raised only when no endpoint produced an answer.
    """
    endpoints = registry.selected(endpoint_ids)
    if not endpoints:
        raise AllEndpointsFailed("no endpoints registered")
    text = serialize(query) if isinstance(query, StructuredQuery) else query

    def one(endpoint: Endpoint):
        return execute(replace(endpoint, timeout_ms=timeout_ms), text)

    results: list[ResultSet] = []
    truncated = False
    failures: list[str] = []
    with ThreadPoolExecutor(max_workers=len(endpoints)) as pool:
        futures = {pool.submit(one, e): e for e in endpoints}
        for future, endpoint in futures.items():
            try:
                results.append(future.result())
            except QueryTimeout:
                truncated = True
                log.warning("endpoint %s timed out", endpoint.id)
            except EndpointError as exc:
                failures.append(f"{endpoint.id}: {exc}")
    if not results:
        raise AllEndpointsFailed("; ".join(failures) or "all endpoints timed out")

    columns: list[str] = []
    for result in results:
        for column in result.columns:
            if column not in columns:
                columns.append(column)
    seen = set()
    rows = []
    for result in results:
        for row in result.rows:
            key = row_key(row)
            if key not in seen:
                seen.add(key)
                rows.append(row)
    return ResultSet(columns=columns, rows=rows,
                     truncated=truncated or any(r.truncated for r in results))


@dataclass
class PrefetchResult:
    rows: ResultSet          # capped at PREFETCH_ROW_CAP
    answer_count: int        # pre-cap row count


def prefetch(registry: Registry,
             queries: Sequence[Union[StructuredQuery, str]],
             timeout_ms: int = DEFAULT_TIMEOUT_MS,
             endpoint_ids: Optional[Sequence[str]] = None,
             fan_out: int = 4,
             row_cap: int = PREFETCH_ROW_CAP,
             execute=execute_remote) -> list[Optional[PrefetchResult]]:
    """Execute candidate queries; failed candidates come back as None."""
    def one(query):
        try:
            result = execute_federated(registry, query, timeout_ms=timeout_ms,
                                       endpoint_ids=endpoint_ids, execute=execute)
        except (EndpointError, AllEndpointsFailed) as exc:
            log.info("candidate dropped: %s", exc)
            return None
        capped = ResultSet(columns=result.columns, rows=result.rows[:row_cap],
                           truncated=result.truncated)
        return PrefetchResult(rows=capped, answer_count=len(result.rows))

    if not queries:
        return []
    with ThreadPoolExecutor(max_workers=min(fan_out, len(queries))) as pool:
        return list(pool.map(one, queries))
