"""The "did you mean" flow: a misspelled literal and a verbalized predicate.

The user asks for people with surname "Kennedys" (plural - no such
literal exists) through a predicate they typed as "wife". Executing the
query returns nothing, but the suggestion pass finds both repairs and
prefetches their answers.
"""
from scribe.federation import Registry, execute_federated
from scribe.fixtures import NS, fixture_path
from scribe.initializer import InitConfig, initialize
from scribe.literal_index import build_index
from scribe.rdf import Endpoint, Local, load_ntriples, parse, serialize
from scribe.similarity import Lexicon
from scribe.suggestions import QsmDeps, find_predicate_alternatives, suggest_term_queries

store = load_ntriples(fixture_path("kennedy"))
endpoint = Endpoint("kennedy", Local(store))
registry = Registry()
registry.register(endpoint)

snapshot = initialize(endpoint, InitConfig())
deps = QsmDeps(predicates=[uri for uri, _ in snapshot.predicates],
               index=build_index(snapshot, k=len(snapshot.literals)),
               registry=registry, lexicon=Lexicon.bundled())

query = parse('SELECT ?person WHERE { ?person <%ssurname> "Kennedys" }' % NS)
result = execute_federated(registry, query)
print(f"user query returned {len(result.rows)} rows\n")

print("== suggestions ==")
for s in suggest_term_queries(query, deps):
    change = s.change
    print(f'did you mean {change.replacement} instead of {change.original}? '
          f"there are {s.answer_count} answers available "
          f"(similarity {change.score:.3f})")
print()
print("the winning suggestion, ready to run:")
best = suggest_term_queries(query, deps)[0]
print(serialize(best.query))
print(f"...with {len(best.prefetched.rows)} prefetched rows, e.g. "
      f"{best.prefetched.rows[0]}")

print("\n== predicate verbalizations ==")
print('the lexicon knows "wife" and "husband" verbalize "spouse":')
for alt in find_predicate_alternatives("wife", [uri for uri, _ in
                                                snapshot.predicates],
                                       Lexicon.bundled()):
    print(f"  wife -> {alt.replacement.value} "
          f"(score {alt.score:.2f}, via {alt.source})")
