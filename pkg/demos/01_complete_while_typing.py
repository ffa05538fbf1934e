"""Watch the completion engine react keystroke by keystroke.

Bootstraps the bundled Kennedy-family fixture, builds the literal index
with a tiny suffix tree (so the residual bins actually get scanned), and
replays a user typing into the object box of a triple pattern.
"""
from scribe.completion import CompletionRequest, ScanPool, complete_events
from scribe.fixtures import fixture_path
from scribe.initializer import InitConfig, initialize
from scribe.literal_index import build_index
from scribe.rdf import Endpoint, Local, load_ntriples

store = load_ntriples(fixture_path("kennedy"))
endpoint = Endpoint("kennedy", Local(store))

print("== one-time initialization ==")
snapshot = initialize(endpoint, InitConfig())
print(f"cached {len(snapshot.predicates)} predicates and "
      f"{len(snapshot.literals)} literals "
      f"with {snapshot.stats.queries_issued} queries\n")

# keep only the 3 most significant literals in the tree; the rest go to
# length-keyed residual bins
index = build_index(snapshot, k=3)
print(f"suffix tree holds {len(index.tree_entries)} strings; "
      f"{index.bins.total_count} residual literals in bins "
      f"{index.bins.keys()}\n")

pool = ScanPool(index, processes=2)
for typed in ("K", "Ke", "Ken", "Kenn", "Kennedy", "?person"):
    print(f'typing {typed!r}:')
    request = CompletionRequest(text=typed, slot="object", k=5)
    for phase, items in complete_events(index, request, pool=pool):
        labels = ", ".join(f"{s.display} [{s.kind}]" for s in items) or "-"
        print(f"  {phase:>4}: {labels}")
pool.close()

print("\nA leading '?' means the user is naming a variable, so the last "
      "request gets no suggestions.")
