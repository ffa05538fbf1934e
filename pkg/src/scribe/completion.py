"""Query completion: find up to k indexed strings containing the typed text.

Suffix-tree matches are produced first so the caller can deliver them
before the residual-bin scan starts. Bins whose key lies in
[len(t), len(t) + gamma] are then scanned sequentially, with the work
spread over P processes by the capacity-filling task assignment below.
"""
from __future__ import annotations

import multiprocessing as mp
import os
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .literal_index import LITERAL, PREDICATE, IndexEntry, LiteralIndex
from .similarity import DEFAULT_JW, JwParams, jaro_winkler

DEFAULT_K = 10
DEFAULT_GAMMA = 10


@dataclass
class CompletionRequest:
    text: str
    slot: str = "object"            # subject | predicate | object
    k: int = DEFAULT_K
    gamma: int = DEFAULT_GAMMA

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.slot not in ("subject", "predicate", "object"):
            raise ValueError(f"unknown slot {self.slot!r}")

    @property
    def is_variable(self) -> bool:
        return self.text.startswith("?")


@dataclass(frozen=True)
class Suggestion:
    display: str
    kind: str
    canonical: str

    @classmethod
    def of(cls, entry: IndexEntry) -> "Suggestion":
        return cls(display=entry.display, kind=entry.kind,
                   canonical=entry.canonical)


@dataclass
class CompletionResponse:
    from_tree: list[Suggestion] = field(default_factory=list)
    from_bins: list[Suggestion] = field(default_factory=list)


@dataclass(frozen=True)
class BinSlice:
    bin_key: int
    start: int
    end: int  # inclusive


def assign_tasks(bins: list[tuple[int, int]], processes: int) -> list[list[BinSlice]]:
    """Spread `bins` (key, size) over `processes` capacity-filled workers.

    Walks the bins in order, filling each process up to d = n/P literals
    and splitting a bin whenever the remaining capacity is smaller than
    what is left of it; the last process absorbs the integer remainder.
    """
    if processes < 1:
        raise ValueError("processes must be >= 1")
    total = sum(size for _, size in bins)
    base = total // processes
    capacities = [base] * processes
    capacities[-1] = total - base * (processes - 1)
    assignments: list[list[BinSlice]] = [[] for _ in range(processes)]
    pid = 0
    for key, size in bins:
        remaining = size
        while remaining > 0:
            start = size - remaining
            capacity = capacities[pid]
            if remaining < capacity:
                assignments[pid].append(BinSlice(key, start, size - 1))
                capacities[pid] -= remaining
                remaining = 0
            else:
                if capacity > 0:
                    assignments[pid].append(BinSlice(key, start, start + capacity - 1))
                remaining -= capacity
                capacities[pid] = 0
                pid += 1
    return assignments


# --- worker pool -------------------------------------------------------------

def _scan_slices(payload: dict[int, list[str]], mode: str, term: str,
                 slices: list[BinSlice], extra) -> list[tuple]:
    out: list[tuple] = []
    if mode == "substring":
        for piece in slices:
            bucket = payload[piece.bin_key]
            for i in range(piece.start, piece.end + 1):
                if term in bucket[i]:
                    out.append((piece.bin_key, i))
    elif mode == "jw":
        params, threshold = extra
        for piece in slices:
            bucket = payload[piece.bin_key]
            for i in range(piece.start, piece.end + 1):
                score = jaro_winkler(term, bucket[i], params)
                if score >= threshold:
                    out.append((piece.bin_key, i, score))
    else:
        raise ValueError(f"unknown scan mode {mode!r}")
    return out


def _worker_main(conn, payload: dict[int, list[str]]) -> None:
    try:
        while True:
            message = conn.recv()
            if message is None:
                return
            conn.send(_scan_slices(payload, *message))
    except (EOFError, KeyboardInterrupt):
        pass


class ScanPool:
    """Stateless readers of the immutable bins, one process per worker.

    With `processes=1` the scan runs inline; otherwise fork-started
    workers inherit the bin payload and receive only (term, slices)
    messages per request, so per-keystroke traffic stays tiny.
    """

    def __init__(self, index: LiteralIndex, processes: Optional[int] = None):
        self.processes = processes or os.cpu_count() or 1
        self._payload = {key: [e.folded for e in index.bins.bin(key)]
                         for key in index.bins.keys()}
        self._index = index
        self._workers: list[tuple] = []
        self._lock = threading.Lock()  # pipe protocol is request/response
        if self.processes > 1:
            ctx = mp.get_context("fork")
            for _ in range(self.processes):
                parent_conn, child_conn = ctx.Pipe()
                proc = ctx.Process(target=_worker_main,
                                   args=(child_conn, self._payload), daemon=True)
                proc.start()
                child_conn.close()
                self._workers.append((proc, parent_conn))

    def close(self) -> None:
        for proc, conn in self._workers:
            try:
                conn.send(None)
                conn.close()
            except (BrokenPipeError, OSError):
                pass
        for proc, _ in self._workers:
            proc.join(timeout=2)
            if proc.is_alive():
                proc.terminate()
        self._workers = []

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _run(self, mode: str, term: str, window: list[tuple[int, int]],
             extra=None) -> list[tuple]:
        per_process = assign_tasks(window, self.processes)
        if not self._workers:
            merged: list[tuple] = []
            for slices in per_process:
                merged.extend(_scan_slices(self._payload, mode, term, slices, extra))
            return merged
        with self._lock:
            active = []
            for (proc, conn), slices in zip(self._workers, per_process):
                if slices:
                    conn.send((mode, term, slices, extra))
                    active.append(conn)
            merged = []
            for conn in active:
                merged.extend(conn.recv())
        return merged

    def substring_scan(self, term: str, low: int, high: int) -> list[IndexEntry]:
        window = self._index.bin_range(low, high)
        hits = self._run("substring", term.casefold(), window)
        return [self._index.bins.bin(key)[i] for key, i in hits]

    def jw_scan(self, term: str, low: int, high: int,
                params: JwParams = DEFAULT_JW) -> list[tuple[IndexEntry, float]]:
        window = self._index.bin_range(low, high)
        hits = self._run("jw", term.casefold(), window,
                         extra=(params, params.threshold))
        return [(self._index.bins.bin(key)[i], score) for key, i, score in hits]


# --- completion --------------------------------------------------------------

_SLOT_KINDS = {
    "subject": {PREDICATE, LITERAL},
    "predicate": {PREDICATE},
    "object": {PREDICATE, LITERAL},
}


def complete_events(index: LiteralIndex, request: CompletionRequest,
                    pool: Optional[ScanPool] = None,
                    cancelled: Optional[Callable[[], bool]] = None
                    ) -> Iterator[tuple[str, list[Suggestion]]]:
    """Yields ("tree", ...) as soon as it is known, then ("bins", ...)."""
    text = request.text
    if not text or request.is_variable:
        yield ("tree", [])
        yield ("bins", [])
        return

    kinds = _SLOT_KINDS[request.slot]
    tree_entries = index.tree_lookup(text, kinds=kinds)
    from_tree: list[Suggestion] = []
    seen: set[tuple[str, str]] = set()
    for entry in tree_entries:
        key = (entry.kind, entry.canonical)
        if key not in seen:
            seen.add(key)
            from_tree.append(Suggestion.of(entry))
            if len(from_tree) == request.k:
                break
    yield ("tree", from_tree)

    remainder = request.k - len(from_tree)
    if remainder <= 0 or LITERAL not in kinds:
        yield ("bins", [])
        return
    if cancelled is not None and cancelled():
        return

    low, high = len(text), len(text) + request.gamma
    owns_pool = pool is None
    pool = pool or ScanPool(index, processes=1)
    try:
        matches = pool.substring_scan(text, low, high)
    finally:
        if owns_pool:
            pool.close()
    if cancelled is not None and cancelled():
        return
    matches.sort(key=lambda e: (len(e.display), e.display))
    from_bins: list[Suggestion] = []
    for entry in matches:
        key = (entry.kind, entry.canonical)
        if key not in seen:
            seen.add(key)
            from_bins.append(Suggestion.of(entry))
            if len(from_bins) == remainder:
                break
    yield ("bins", from_bins)


def complete(index: LiteralIndex, request: CompletionRequest,
             pool: Optional[ScanPool] = None,
             cancelled: Optional[Callable[[], bool]] = None
             ) -> Optional[CompletionResponse]:
    """Assembled two-phase completion; None if the request was cancelled."""
    response = CompletionResponse()
    phases = 0
    for phase, items in complete_events(index, request, pool, cancelled):
        phases += 1
        if phase == "tree":
            response.from_tree = items
        else:
            response.from_bins = items
    if phases < 2:
        return None
    return response


def elimination_ratio(index: LiteralIndex, text: str,
                      gamma: int = DEFAULT_GAMMA) -> float:
    """Fraction of residual literals skipped by the length window."""
    total = index.bins.total_count
    if total == 0:
        return 0.0
    windowed = sum(count for _, count in
                   index.bin_range(len(text), len(text) + gamma))
    return 1.0 - windowed / total
