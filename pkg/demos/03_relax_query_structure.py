"""Structural relaxation on the book-catalogue fixture.

The user believes writer and publisher names hang directly off the book:

    ?book writer "Jack Kerouac" .  ?book publisher "Viking Press"

In the data both names live one hop further away, behind entities. The
query returns nothing, so the engine connects the two literals through
the dataset graph with a budgeted Steiner-style search and suggests the
query that the data actually supports.
"""
from scribe.federation import Registry
from scribe.fixtures import NS, fixture_path
from scribe.initializer import InitConfig, initialize
from scribe.literal_index import build_index
from scribe.rdf import Endpoint, Local, evaluate, load_ntriples, parse, serialize
from scribe.relaxation import relax_structure
from scribe.similarity import Lexicon
from scribe.suggestions import QsmDeps

store = load_ntriples(fixture_path("kerouac"))
endpoint = Endpoint("books", Local(store))
registry = Registry()
registry.register(endpoint)

snapshot = initialize(endpoint, InitConfig())
deps = QsmDeps(predicates=[uri for uri, _ in snapshot.predicates],
               index=build_index(snapshot, k=len(snapshot.literals)),
               registry=registry, lexicon=Lexicon.bundled())

query = parse(
    'SELECT ?book WHERE { ?book <%swriter> "Jack Kerouac" . '
    '?book <%spublisher> "Viking Press" }' % (NS, NS))
print("user query:")
print(serialize(query))
print(f"\n-> {len(evaluate(store, query).rows)} answers. "
      "The structure does not match the data.\n")

suggestions, trace = relax_structure(query, deps, endpoint)
print(f"relaxation explored {len(trace.expansion_order)} vertices with "
      f"{trace.budget_used}/{trace.budget_limit} queries "
      f"({trace.memo_hits} memo hits) and produced "
      f"{len(suggestions)} suggestion(s)\n")

for i, suggestion in enumerate(suggestions):
    print(f"== suggestion {i}: {suggestion.answer_count} answers ==")
    print(serialize(suggestion.query))
    for row in suggestion.prefetched.rows:
        print("   answer:", {var: str(term) for var, term in row.items()})
    print()

print("expansion order (first ten):")
for vertex in trace.expansion_order[:10]:
    print("  ", vertex)
