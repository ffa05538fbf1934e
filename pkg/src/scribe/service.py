"""HTTP+JSON API binding the engine together for clients.

Endpoints are registered and initialized once; afterwards the service
answers completion requests from the immutable index, executes queries
through the federated layer while computing suggestions, and serves
accepted suggestions straight from their prefetched rows (never
re-executing them). Completion uses its own scan pool so keystrokes are
never queued behind suggestion work.
"""
from __future__ import annotations

import json
import logging
import threading
import time
import uuid
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .completion import CompletionRequest, ScanPool, complete_events
from .errors import (
    AllEndpointsFailed,
    EndpointError,
    InitFailure,
    ParseError,
    ScribeError,
    UnsupportedFeature,
)
from .federation import Registry, execute_federated
from .fixtures import fixture_path
from .initializer import CacheSnapshot, InitConfig, initialize
from .literal_index import LiteralIndex, build_index
from .rdf import (
    Endpoint,
    Literal,
    Local,
    Remote,
    ResultSet,
    Uri,
    execute_remote,
    load_ntriples,
    local_name,
    parse,
    serialize,
)
from .relaxation import relax_structure
from .similarity import Lexicon
from .suggestions import QsmDeps, SuggestedQuery, TermAlternative, suggest_term_queries

log = logging.getLogger(__name__)

SESSION_TTL_S = 30 * 60


class ApiError(ScribeError):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


@dataclass
class ServiceConfig:
    snapshot_dir: Optional[Path] = None
    lexicon: Optional[Lexicon] = None
    processes: Optional[int] = None
    session_ttl_s: float = SESSION_TTL_S
    ui_dir: Optional[Path] = None
    execute: object = staticmethod(execute_remote)


@dataclass
class EngineState:
    endpoint: Endpoint
    snapshot: CacheSnapshot
    index: LiteralIndex
    deps: QsmDeps
    completion_pool: ScanPool
    relaxation_trace: object = None


@dataclass
class Session:
    session_id: str
    epoch: int = 0
    current_query: object = None
    last_result: Optional[ResultSet] = None
    pending: list[SuggestedQuery] = field(default_factory=list)
    touched: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class QueryService:
    def __init__(self, config: Optional[ServiceConfig] = None):
        self.config = config or ServiceConfig()
        self.lexicon = self.config.lexicon or Lexicon.bundled()
        self.registry = Registry()
        self.engines: dict[str, EngineState] = {}
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def close(self) -> None:
        for engine in self.engines.values():
            engine.completion_pool.close()
            if engine.deps.pool is not None:
                engine.deps.pool.close()

    # --- endpoint registration ------------------------------------------

    def register_endpoint(self, payload: dict) -> dict:
        endpoint = self._endpoint_from_payload(payload)
        config = self._init_config(payload.get("config") or {})
        snapshot_path = None
        if self.config.snapshot_dir is not None:
            snapshot_path = Path(self.config.snapshot_dir) / f"{endpoint.id}.jsonl"
        try:
            snapshot = initialize(endpoint, config, execute=self.config.execute,
                                  snapshot_path=snapshot_path)
        except InitFailure as exc:
            raise ApiError(502, f"initialization failed: {exc}") from exc
        index = build_index(snapshot, k=config.significant_literal_count)
        registry = Registry()
        registry.register(endpoint)
        deps = QsmDeps(predicates=[uri for uri, _ in snapshot.predicates],
                       index=index, registry=registry, lexicon=self.lexicon,
                       pool=ScanPool(index, processes=self.config.processes),
                       execute=self.config.execute)
        engine = EngineState(endpoint=endpoint, snapshot=snapshot, index=index,
                             deps=deps,
                             completion_pool=ScanPool(
                                 index, processes=self.config.processes))
        with self._lock:
            old = self.engines.get(endpoint.id)
            self.engines[endpoint.id] = engine
            self.registry.register(endpoint)
        if old is not None:
            old.completion_pool.close()
            if old.deps.pool is not None:
                old.deps.pool.close()
        return {
            "endpointId": endpoint.id,
            "initStats": {
                "queriesIssued": snapshot.stats.queries_issued,
                "queriesTimedOut": snapshot.stats.queries_timed_out,
                "literalCount": snapshot.stats.literal_count,
                "predicateCount": len(snapshot.predicates),
            },
        }

    def _endpoint_from_payload(self, payload: dict) -> Endpoint:
        url = payload.get("url")
        local_file = payload.get("localFile")
        fixture = payload.get("fixture")
        timeout_ms = int(payload.get("timeoutMs", 30_000))
        if url:
            if not str(url).startswith(("http://", "https://")):
                raise ApiError(400, f"not a usable endpoint URL: {url!r}")
            endpoint_id = payload.get("id") or str(url)
            return Endpoint(endpoint_id, Remote(str(url)), timeout_ms=timeout_ms)
        if fixture:
            local_file = fixture_path(str(fixture))
        if local_file:
            path = Path(local_file)
            if not path.is_file():
                raise ApiError(400, f"no such file: {path}")
            endpoint_id = payload.get("id") or path.stem
            return Endpoint(endpoint_id, Local(load_ntriples(path)),
                            timeout_ms=timeout_ms)
        raise ApiError(400, "provide url, localFile or fixture")

    @staticmethod
    def _init_config(raw: dict) -> InitConfig:
        try:
            return InitConfig(
                max_literal_length=int(raw.get("maxLength", 80)),
                language=str(raw.get("lang", "en")),
                query_budget=(int(raw["budget"]) if "budget" in raw else None),
                page_size=int(raw.get("pageSize", 10_000)),
                significant_literal_count=int(raw.get("k", 40_000)),
                warehouse_mode=bool(raw.get("warehouse", False)),
            )
        except (TypeError, ValueError) as exc:
            raise ApiError(400, f"bad config: {exc}") from exc

    def _engine(self, endpoint_id: str) -> EngineState:
        try:
            return self.engines[endpoint_id]
        except KeyError:
            raise ApiError(404, f"unknown endpoint {endpoint_id!r}") from None

    # --- completion -------------------------------------------------------

    def complete_events(self, payload: dict):
        engine = self._engine(str(payload.get("endpointId")))
        try:
            request = CompletionRequest(
                text=str(payload.get("text", "")),
                slot=str(payload.get("slot", "object")),
                k=int(payload.get("k", 10)),
                gamma=int(payload.get("gamma", 10)))
        except ValueError as exc:
            raise ApiError(400, str(exc)) from exc
        language = engine.index.language or None
        for phase, items in complete_events(engine.index, request,
                                            pool=engine.completion_pool):
            yield phase, [
                {"display": s.display, "kind": s.kind, "canonical": s.canonical,
                 **({"language": language} if s.kind == "literal" and language
                    else {})}
                for s in items]

    def complete(self, payload: dict) -> dict:
        body = {"fromTree": [], "fromBins": []}
        for phase, items in self.complete_events(payload):
            body["fromTree" if phase == "tree" else "fromBins"] = items
        return body

    # --- execution and suggestion -----------------------------------------

    def execute(self, payload: dict) -> dict:
        ids = payload.get("endpointIds") or [payload.get("endpointId")]
        ids = [str(i) for i in ids if i]
        if not ids:
            raise ApiError(400, "endpointId(s) required")
        engines = [self._engine(i) for i in ids]
        text = payload.get("query")
        if not text:
            raise ApiError(400, "query required")
        try:
            query = parse(str(text))
        except (ParseError, UnsupportedFeature, ScribeError) as exc:
            raise ApiError(400, f"invalid query: {exc}") from exc

        try:
            result = execute_federated(self.registry, query,
                                       endpoint_ids=ids,
                                       execute=self.config.execute)
        except AllEndpointsFailed as exc:
            raise ApiError(502, str(exc)) from exc

        primary = engines[0]
        deps = primary.deps
        k = int(payload.get("k", 10))
        suggestions: list[SuggestedQuery] = []
        try:
            suggestions.extend(suggest_term_queries(query, deps, k=k))
        except EndpointError as exc:
            log.warning("term suggestion failed: %s", exc)
        try:
            relaxed, trace = relax_structure(
                query, deps, primary.endpoint,
                budget_limit=int(payload.get("relaxationBudget", 100)))
            primary.relaxation_trace = trace
            suggestions.extend(relaxed)
        except EndpointError as exc:
            log.warning("relaxation failed: %s", exc)

        session = self._session_for(payload.get("sessionId"))
        with session.lock:
            session.epoch += 1
            session.current_query = query
            session.last_result = result
            session.pending = suggestions
            session.touched = time.monotonic()
            epoch = session.epoch

        return {
            "sessionId": session.session_id,
            "epoch": epoch,
            "result": result_to_dict(result),
            "suggestions": [self._suggestion_to_dict(i, s)
                            for i, s in enumerate(suggestions)],
        }

    def _session_for(self, session_id) -> Session:
        now = time.monotonic()
        with self._lock:
            expired = [sid for sid, s in self.sessions.items()
                       if now - s.touched > self.config.session_ttl_s]
            for sid in expired:
                del self.sessions[sid]
            if session_id:
                session = self.sessions.get(str(session_id))
                if session is not None:
                    return session
                session = Session(session_id=str(session_id))
            else:
                session = Session(session_id=uuid.uuid4().hex)
            self.sessions[session.session_id] = session
            return session

    @staticmethod
    def _suggestion_to_dict(i: int, suggestion: SuggestedQuery) -> dict:
        change = suggestion.change
        count = suggestion.answer_count
        if isinstance(change, TermAlternative):
            kind = "term"
            message = (f"Did you mean {term_display(change.replacement)} "
                       f"instead of {term_display(change.original)}? "
                       f"There are {count:,} answers available.")
        else:
            kind = "structure"
            message = (f"Did you mean a query with a different structure? "
                       f"There are {count:,} answers available.")
        return {
            "index": i,
            "kind": kind,
            "message": message,
            "answerCount": count,
            "query": serialize(suggestion.query),
        }

    # --- suggestion acceptance ---------------------------------------------

    def accept(self, payload: dict) -> dict:
        session_id = str(payload.get("sessionId", ""))
        with self._lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        with session.lock:
            epoch = payload.get("epoch")
            if epoch is None or int(epoch) != session.epoch:
                raise ApiError(409, "suggestions are stale; execute again")
            try:
                index = int(payload.get("suggestionIndex"))
                suggestion = session.pending[index]
                if index < 0:
                    raise IndexError(index)
            except (TypeError, ValueError, IndexError):
                raise ApiError(409, "no such suggestion") from None
            # served purely from the prefetched rows: no endpoint traffic
            session.current_query = suggestion.query
            session.last_result = suggestion.prefetched
            session.pending = []
            session.touched = time.monotonic()
            return {
                "sessionId": session.session_id,
                "query": serialize(suggestion.query),
                "result": result_to_dict(suggestion.prefetched),
            }


def term_display(term) -> str:
    if isinstance(term, Uri):
        return local_name(term.value)
    if isinstance(term, Literal):
        return f'"{term.lexical}"'
    return str(term)


def result_to_dict(result: ResultSet) -> dict:
    rows = []
    for row in result.rows:
        cells = {}
        for var, term in row.items():
            if isinstance(term, Uri):
                cells[var] = {"type": "uri", "value": term.value,
                              "display": local_name(term.value)}
            else:
                cell = {"type": "literal", "value": term.lexical,
                        "display": term.lexical}
                if term.language:
                    cell["xml:lang"] = term.language
                if term.datatype:
                    cell["datatype"] = term.datatype
                cells[var] = cell
        rows.append(cells)
    return {"columns": result.columns, "rows": rows,
            "truncated": result.truncated}


# --- HTTP transport -------------------------------------------------------------

class ServiceServer:
    def __init__(self, service: QueryService, port: int = 0,
                 host: str = "127.0.0.1"):
        self.service = service
        ui_dir = service.config.ui_dir
        outer = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):
                log.debug("http: " + fmt, *args)

            def _send_json(self, status: int, body: dict) -> None:
                data = json.dumps(body, ensure_ascii=False).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                self.wfile.write(data)

            def _read_payload(self) -> dict:
                length = int(self.headers.get("Content-Length", 0))
                if length == 0:
                    return {}
                try:
                    return json.loads(self.rfile.read(length).decode("utf-8"))
                except json.JSONDecodeError as exc:
                    raise ApiError(400, f"bad JSON body: {exc}") from exc

            def do_OPTIONS(self):
                self.send_response(204)
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
                self.send_header("Access-Control-Allow-Methods",
                                 "GET, POST, OPTIONS")
                self.send_header("Content-Length", "0")
                self.end_headers()

            def do_POST(self):
                try:
                    payload = self._read_payload()
                    if self.path == "/endpoints":
                        self._send_json(200, outer.service.register_endpoint(payload))
                    elif self.path == "/complete":
                        if payload.get("stream"):
                            self._stream_completion(payload)
                        else:
                            self._send_json(200, outer.service.complete(payload))
                    elif self.path == "/execute":
                        self._send_json(200, outer.service.execute(payload))
                    elif self.path == "/accept":
                        self._send_json(200, outer.service.accept(payload))
                    else:
                        self._send_json(404, {"error": f"no route {self.path}"})
                except ApiError as exc:
                    self._send_json(exc.status, {"error": str(exc)})
                except ScribeError as exc:
                    self._send_json(500, {"error": str(exc)})

            def _stream_completion(self, payload: dict) -> None:
                # two NDJSON lines: tree matches first, bin matches second
                self.send_response(200)
                self.send_header("Content-Type", "application/x-ndjson")
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Transfer-Encoding", "chunked")
                self.end_headers()

                def chunk(data: bytes) -> None:
                    self.wfile.write(f"{len(data):X}\r\n".encode("ascii"))
                    self.wfile.write(data + b"\r\n")
                    self.wfile.flush()

                for phase, items in outer.service.complete_events(payload):
                    line = json.dumps(
                        {"phase": phase, "suggestions": items},
                        ensure_ascii=False).encode("utf-8") + b"\n"
                    chunk(line)
                chunk(b"")

            def do_GET(self):
                if self.path in ("/health", "/health/"):
                    self._send_json(200, {"status": "ok",
                                          "endpoints": sorted(outer.service.engines)})
                    return
                if ui_dir is not None:
                    self._serve_static()
                    return
                self._send_json(404, {"error": "not found"})

            def _serve_static(self):
                rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
                path = (Path(ui_dir) / rel).resolve()
                if not str(path).startswith(str(Path(ui_dir).resolve())) \
                        or not path.is_file():
                    self._send_json(404, {"error": "not found"})
                    return
                kinds = {".html": "text/html", ".js": "text/javascript",
                         ".css": "text/css", ".json": "application/json",
                         ".map": "application/json", ".svg": "image/svg+xml"}
                data = path.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type",
                                 kinds.get(path.suffix, "application/octet-stream"))
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def start(self) -> "ServiceServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        self.service.close()

    def serve_forever(self) -> None:
        log.info("listening on %s", self.url)
        try:
            self._httpd.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    def __enter__(self) -> "ServiceServer":
        return self.start()

    def __exit__(self, *exc):
        self.stop()
