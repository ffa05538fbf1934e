import pytest

from scribe.fixtures import NS, RES, load_fixture
from scribe.rdf import Literal, Triple, TripleStore, Uri


def uri(local: str, base: str = RES) -> Uri:
    return Uri(base + local)


def en(text: str) -> Literal:
    return Literal(text, language="en")


@pytest.fixture(scope="session")
def kerouac_store() -> TripleStore:
    return load_fixture("kerouac")


@pytest.fixture(scope="session")
def kennedy_store() -> TripleStore:
    return load_fixture("kennedy")


@pytest.fixture(scope="session")
def films_store() -> TripleStore:
    return load_fixture("films")


def make_store(*spo) -> TripleStore:
    return TripleStore(Triple(s, p, o) for s, p, o in spo)
