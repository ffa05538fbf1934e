"""Serve a local triple store over the SPARQL protocol.

Used as a loopback test endpoint, by the demos, and to publish N-Triples
files for federation experiments. ``delay_s`` injects artificial latency
so clients can exercise their timeout paths.
"""
from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..errors import ScribeError
from .endpoints import results_to_json
from .sparql import parse
from .store import TripleStore, evaluate


class StoreServer:
    def __init__(self, store: TripleStore, delay_s: float = 0.0, port: int = 0):
        self.store = store
        self.delay_s = delay_s
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                params = parse_qs(urlparse(self.path).query)
                self._answer(params.get("query", [None])[0])

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = self.rfile.read(length).decode("utf-8")
                params = parse_qs(body)
                self._answer(params.get("query", [None])[0])

            def _answer(self, query_text):
                if outer.delay_s:
                    time.sleep(outer.delay_s)
                if not query_text:
                    self.send_error(400, "missing query parameter")
                    return
                try:
                    result = evaluate(outer.store, parse(query_text))
                except ScribeError as exc:
                    self.send_error(400, str(exc))
                    return
                payload = results_to_json(result).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/sparql-results+json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}/sparql"

    def start(self) -> "StoreServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "StoreServer":
        return self.start()

    def __exit__(self, *exc):
        self.stop()
