"""Record service responses into fixtures/replay.json.

Runs the real engine against the bundled fixture stores and captures
exactly the interactions the offline demo and the e2e tests replay:
completions on the cities endpoint, the failing Kennedys query with its
suggestions, and each suggestion's accepted answer table.

Usage: python tools/record_replay.py  (from the frontend/ directory)
"""
import json
from pathlib import Path

import requests

from scribe.service import QueryService, ServiceConfig, ServiceServer

NS = "http://example.org/ns/"
# exactly the text the UI's draft serializer produces for
#   ?person | surname (picked) | Kennedys
KENNEDYS_QUERY = ('SELECT * WHERE {\n'
                  '  ?person <%ssurname> "Kennedys" .\n'
                  '}' % NS)


def normalize(text: str) -> str:
    return " ".join(text.split())


def main() -> None:
    fixture = {"endpoints": {}, "completions": {}, "executions": {},
               "accepts": {}}
    with ServiceServer(QueryService(ServiceConfig(processes=1))) as server:
        for name, config in (("cities", {"k": 2}), ("kennedy", {"k": 3})):
            response = requests.post(server.url + "/endpoints",
                                     json={"fixture": name, "id": name,
                                           "config": config})
            response.raise_for_status()
            fixture["endpoints"][name] = response.json()

        for endpoint, slot, text in (
            ("cities", "object", "York"),
            ("cities", "object", "New"),
            ("kennedy", "object", "Kenn"),
            ("kennedy", "object", "Kennedy"),
            ("kennedy", "predicate", "surname"),
            ("kennedy", "predicate", "name"),
        ):
            body = requests.post(server.url + "/complete",
                                 json={"endpointId": endpoint, "slot": slot,
                                       "text": text}).json()
            fixture["completions"][f"{endpoint}|{slot}|{text}"] = {
                "tree": body["fromTree"], "bins": body["fromBins"]}

        executed = requests.post(server.url + "/execute",
                                 json={"endpointId": "kennedy",
                                       "query": KENNEDYS_QUERY,
                                       "sessionId": "replay"}).json()
        fixture["executions"][f"kennedy|{normalize(KENNEDYS_QUERY)}"] = executed

        for suggestion in executed["suggestions"]:
            # every accept needs a fresh epoch, so re-execute first
            fresh = requests.post(server.url + "/execute",
                                  json={"endpointId": "kennedy",
                                        "query": KENNEDYS_QUERY,
                                        "sessionId": "replay"}).json()
            accepted = requests.post(
                server.url + "/accept",
                json={"sessionId": "replay", "epoch": fresh["epoch"],
                      "suggestionIndex": suggestion["index"]})
            accepted.raise_for_status()
            fixture["accepts"][str(suggestion["index"])] = accepted.json()

    out = Path(__file__).resolve().parent.parent / "fixtures" / "replay.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, ensure_ascii=False, indent=2,
                              sort_keys=True) + "\n", encoding="utf-8")
    print(f"recorded {out}")


if __name__ == "__main__":
    main()
