"""Drive the whole engine over its HTTP API, like the web UI does.

Registers a fixture endpoint, streams a completion (tree matches arrive
in the first chunk, residual-bin matches in the second), executes a
failing query, and accepts the first suggestion - served entirely from
prefetched rows.
"""
import json

import requests

from scribe.fixtures import NS
from scribe.service import QueryService, ServiceConfig, ServiceServer

with ServiceServer(QueryService(ServiceConfig(processes=2))) as server:
    print(f"service at {server.url}\n")

    body = requests.post(server.url + "/endpoints",
                         json={"fixture": "kennedy", "id": "kennedy",
                               "config": {"k": 3}}).json()
    print("registered endpoint:", json.dumps(body, indent=2), "\n")

    print("== streamed completion for 'Kenn' ==")
    with requests.post(server.url + "/complete",
                       json={"endpointId": "kennedy", "slot": "object",
                             "text": "Kenn", "stream": True},
                       stream=True) as response:
        for line in response.iter_lines():
            if line:
                event = json.loads(line)
                names = [s["display"] for s in event["suggestions"]]
                print(f"  chunk {event['phase']}: {names}")

    print("\n== execute a query that finds nothing ==")
    query = 'SELECT ?person WHERE { ?person <%ssurname> "Kennedys" }' % NS
    executed = requests.post(server.url + "/execute",
                             json={"endpointId": "kennedy", "query": query,
                                   "sessionId": "demo"}).json()
    print(f"rows: {len(executed['result']['rows'])}")
    for s in executed["suggestions"][:3]:
        print(f"  [{s['index']}] {s['message']}")

    print("\n== accept suggestion 0 (no endpoint traffic) ==")
    accepted = requests.post(server.url + "/accept",
                             json={"sessionId": "demo",
                                   "epoch": executed["epoch"],
                                   "suggestionIndex": 0}).json()
    print(f"accepted query:\n{accepted['query']}")
    print(f"served {len(accepted['result']['rows'])} prefetched rows "
          "immediately")
