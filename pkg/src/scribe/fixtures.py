"""Bundled fixture stores used by tests, demos and the benchmark harness."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .rdf import TripleStore, loads_ntriples

NS = "http://example.org/ns/"
RES = "http://example.org/res/"


def fixture_path(name: str) -> Path:
    base = resources.files("scribe") / "data" / "fixtures"
    path = base / f"{name}.nt"
    if not path.is_file():
        available = sorted(p.stem for p in Path(str(base)).glob("*.nt"))
        raise FileNotFoundError(f"no fixture {name!r}; available: {available}")
    return Path(str(path))


def load_fixture(name: str) -> TripleStore:
    return loads_ntriples(fixture_path(name).read_text(encoding="utf-8"))
