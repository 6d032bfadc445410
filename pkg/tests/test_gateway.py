from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from aku.fixtures import FIXTURE_TIME, build_store, default_registry
from aku.gateway.http import AppState, create_app
from aku.units import UnitStore


@pytest.fixture
def state(tmp_path):
    path = tmp_path / "bundle.json"
    store = build_store()
    store.save_bundle(path)
    return AppState(store, registry=default_registry(), bundle_path=str(path))


@pytest.fixture
def client(state):
    return TestClient(create_app(state), raise_server_exceptions=False)


def _data(response, status=200):
    assert response.status_code == status, response.text
    body = response.json()
    assert body["ok"] is True
    assert "error" not in body
    return body["data"]


def _error(response, status, code):
    assert response.status_code == status, response.text
    body = response.json()
    assert body["ok"] is False
    assert "data" not in body
    assert body["error"]["code"] == code
    return body["error"]


OVERRIDE = {
    "subject": "site",
    "attribute": "tidal_inundation_pct",
    "value": {"number": {"magnitude": "40", "unit": "pct"}},
    "quality": "assumed",
    "observed_at": "2026-01-16T00:00:00Z",
    "provenance": "ui",
}


# ---------------------------------------------------------------------------
# units
# ---------------------------------------------------------------------------


def test_get_unit_and_not_found(client):
    data = _data(client.get("/units/ex:site-A"))
    assert data["id"] == "ex:site-A"
    assert data["kind"] == "context"
    _error(client.get("/units/ex:absent"), 404, "not_found")


def test_list_units_with_filters(client):
    data = _data(client.get("/units", params={"kind": "action"}))
    assert "ex:mangrove" in data and data == sorted(data)
    data = _data(client.get("/units", params={"kind": "statement", "class": "assertional"}))
    assert data == ["ex:occ-1"]


def test_post_unit_round_trip(client):
    obj = {
        "id": "t:note",
        "kind": "context",
        "frame": "situation",
        "label": "posted context",
        "provenance": {"source": "test", "created_at": FIXTURE_TIME},
        "parts": [],
        "assertions": [],
    }
    data = _data(client.post("/units", json=obj))
    assert data == {"ids": ["t:note"]}
    fetched = _data(client.get("/units/t:note"))
    assert fetched["label"] == "posted context"


def test_post_unit_conflict(client):
    obj = _data(client.get("/units/ex:site-A"))
    obj["label"] = "different"
    _error(client.post("/units", json=obj), 409, "conflict")


def test_post_assertion_and_wrong_frame(client):
    body = dict(OVERRIDE, quality="observed")
    data = _data(client.post("/contexts/ex:site-B/assertions", json=body))
    assert data == {"id": "ex:site-B"}
    report = _data(client.post("/evaluate", json={"action_unit": "ex:mangrove", "context": "ex:site-B"}))
    assert report["verdict"] == "applicable"


# ---------------------------------------------------------------------------
# evaluation, discovery, what-if
# ---------------------------------------------------------------------------


def test_evaluate_site_a(client):
    data = _data(client.post("/evaluate", json={"action_unit": "ex:mangrove", "context": "ex:site-A"}))
    assert data["verdict"] == "applicable"
    assert data["grade"] == "supported"
    assert [row["value"] for row in data["per_condition"]] == ["SAT"] * 5


def test_execute_blocked_returns_200_with_status(client):
    data = _data(client.post("/execute", json={"action_unit": "ex:mangrove", "context": "ex:site-B"}))
    assert data["status"] == "blocked_inapplicable"
    assert data["blocking_report"]["gaps"][0]["reason"] == "violated"


def test_discover_forward_and_reverse(client):
    data = _data(client.get("/discover/forward", params={"context": "ex:site-A", "tags": "restoration"}))
    assert data[0]["action_unit"] == "ex:mangrove"
    data = _data(client.get("/discover/reverse", params={"action_unit": "ex:mangrove"}))
    sites = [(h["context_id"], h["verdict"]) for h in data if h["context_id"].startswith("ex:site")]
    assert sites == [
        ("ex:site-A", "applicable"),
        ("ex:site-C", "undetermined"),
        ("ex:site-B", "inapplicable"),
    ]


def test_whatif_endpoint(client):
    data = _data(
        client.post(
            "/whatif",
            json={"action_unit": "ex:mangrove", "context": "ex:site-B", "overrides": [OVERRIDE]},
        )
    )
    assert data["after"]["verdict"] == "applicable"
    assert data["flips"] == [
        {"label": "tidal inundation within tolerance", "from": "UNSAT", "to": "SAT"}
    ]


def test_affordances(client):
    assert _data(client.get("/affordances", params={"schema": "ex:occurrence-schema"})) == ["ex:derive-ebv"]


# ---------------------------------------------------------------------------
# execution lifecycle over HTTP
# ---------------------------------------------------------------------------


def test_execution_lifecycle_via_http(client):
    record = _data(client.post("/execute", json={"action_unit": "ex:histology", "context": "ex:lab-1"}))
    assert record["status"] == "waiting_manual"
    execution_id = record["id"]

    fetched = _data(client.get(f"/executions/{execution_id}"))
    assert fetched == record

    tasks = _data(client.get("/tasks", params={"execution": execution_id}))
    assert [t["step_id"] for t in tasks] == ["prep"]

    _error(
        client.post(
            f"/tasks/{execution_id}/identify/complete",
            json={"outputs": {"composition_description": {"text": "x"}}},
        ),
        404,
        "not_found",
    )

    record = _data(
        client.post(
            f"/tasks/{execution_id}/prep/complete",
            json={"outputs": {"stained_section": {"ref": "ex:lab-1"}}},
        )
    )
    assert record["status"] == "waiting_manual"
    record = _data(
        client.post(
            f"/tasks/{execution_id}/identify/complete",
            json={"outputs": {"composition_description": {"text": "ok"}}, "outcome": "success"},
        )
    )
    assert record["status"] == "completed"
    assert _data(client.get("/tasks", params={"execution": execution_id})) == []


def test_evidence_endpoint(client):
    data = _data(
        client.post(
            "/evidence",
            json={"action_unit": "ex:mangrove", "context": "ex:site-A", "outcome": "success"},
        )
    )
    assert data["id"].startswith("ev:")
    report = _data(client.post("/evaluate", json={"action_unit": "ex:mangrove", "context": "ex:site-A"}))
    assert report["grade"] == "validated"


def test_mutations_persist_to_bundle(client, state):
    _data(client.post("/contexts/ex:site-C/assertions", json=dict(OVERRIDE, attribute="salinity_psu")))
    reloaded = UnitStore.load_bundle(state.bundle_path)
    saved = reloaded.get_unit("ex:site-C")
    assert any(a.attribute == "salinity_psu" for a in saved.assertions)


# ---------------------------------------------------------------------------
# readonly mode and error mapping
# ---------------------------------------------------------------------------


def test_readonly_rejects_every_mutation(tmp_path):
    path = tmp_path / "bundle.json"
    store = build_store()
    store.save_bundle(path)
    before = path.read_bytes()
    state = AppState(store, registry=default_registry(), bundle_path=str(path), readonly=True)
    client = TestClient(create_app(state), raise_server_exceptions=False)

    _error(client.post("/units", json={"id": "t:x", "kind": "compound"}), 400, "invalid")
    _error(client.post("/contexts/ex:site-A/assertions", json=OVERRIDE), 400, "invalid")
    _error(client.post("/execute", json={"action_unit": "ex:mangrove", "context": "ex:site-A"}), 400, "invalid")
    _error(client.post("/tasks/x/y/complete", json={"outputs": {}}), 400, "invalid")
    _error(client.post("/evidence", json={"action_unit": "ex:mangrove", "context": "ex:site-A"}), 400, "invalid")

    # reads and dry runs still work, and the bundle is untouched
    _data(client.post("/evaluate", json={"action_unit": "ex:mangrove", "context": "ex:site-A"}))
    data = _data(client.post("/execute", json={"action_unit": "ex:mangrove", "context": "ex:site-A", "dry_run": True}))
    assert data["status"] == "pending"
    assert path.read_bytes() == before


def test_invalid_body_gets_structured_envelope(client):
    _error(client.post("/units", json={"id": "t:x", "kind": "mystery"}), 400, "invalid")
    _error(client.post("/evaluate", json={"action_unit": "ex:mangrove"}), 400, "invalid")


def test_envelope_has_exactly_one_of_data_error(client):
    ok_body = client.get("/units/ex:site-A").json()
    assert set(ok_body) == {"ok", "data"}
    err_body = client.get("/units/ex:absent").json()
    assert set(err_body) == {"ok", "error"}
