from .endpoints import Endpoint, Local, Remote, execute_remote, results_from_json, results_to_json
from .ntriples import dump_ntriples, load_ntriples, loads_ntriples
from .sparql import parse, serialize
from .store import TripleStore, evaluate
from .terms import (
    Literal,
    Modifiers,
    ResultSet,
    StructuredQuery,
    Term,
    Triple,
    TriplePattern,
    Uri,
    Variable,
    local_name,
)

__all__ = [
    "Endpoint", "Local", "Remote", "execute_remote",
    "results_from_json", "results_to_json",
    "dump_ntriples", "load_ntriples", "loads_ntriples",
    "parse", "serialize", "TripleStore", "evaluate",
    "Literal", "Modifiers", "ResultSet", "StructuredQuery", "Term",
    "Triple", "TriplePattern", "Uri", "Variable", "local_name",
]
