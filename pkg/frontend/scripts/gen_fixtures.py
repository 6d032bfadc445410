#!/usr/bin/env python3
"""Regenerate workbench test fixtures from the real gateway.

The workbench acceptance check is faithfulness to gateway responses, so the
fixtures are captured from the actual HTTP surface, not hand-written.
Run from frontend/: python3 scripts/gen_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from aku.fixtures import build_store, default_registry
from aku.gateway.http import AppState, create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    state = AppState(build_store(), registry=default_registry())
    client = TestClient(create_app(state))

    def save(name: str, payload) -> None:
        (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote tests/fixtures/{name}")

    for site in ("A", "B", "C"):
        response = client.post(
            "/evaluate", json={"action_unit": "ex:mangrove", "context": f"ex:site-{site}"}
        )
        save(f"report-site-{site.lower()}.json", response.json()["data"])

    override = {
        "subject": "site",
        "attribute": "tidal_inundation_pct",
        "value": {"number": {"magnitude": "40", "unit": "pct"}},
        "quality": "assumed",
        "observed_at": "2026-01-16T00:00:00Z",
        "provenance": "workbench",
    }
    response = client.post(
        "/whatif",
        json={"action_unit": "ex:mangrove", "context": "ex:site-B", "overrides": [override]},
    )
    save("whatif-site-b.json", response.json()["data"])

    response = client.post(
        "/whatif", json={"action_unit": "ex:mangrove", "context": "ex:site-A", "overrides": []}
    )
    save("whatif-empty.json", response.json()["data"])

    save("context-site-a.json", client.get("/units/ex:site-A").json()["data"])

    record = client.post(
        "/execute", json={"action_unit": "ex:histology", "context": "ex:lab-1"}
    ).json()["data"]
    save("execution-histology.json", record)
    tasks = client.get("/tasks", params={"execution": record["id"]}).json()["data"]
    save("task-histology-prep.json", tasks[0])


if __name__ == "__main__":
    main()
