from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from hemeroclim.events import event_to_record, export_heatmap, heatmap
from hemeroclim.query import GeoQueryContext, build_rewrite_plan, parse_query
from hemeroclim.workspace import Workspace, sample_corpus_lines


@pytest.fixture()
def client(workspace) -> TestClient:
    from hemeroclim.service import create_app

    return TestClient(create_app(workspace))


def _data(response, expected_status: int = 200):
    assert response.status_code == expected_status, response.text
    body = response.json()
    assert body["status"] == ("ok" if expected_status < 400 else "error")
    return body["data"] if expected_status < 400 else body["error"]


def test_healthz(client):
    data = _data(client.get("/healthz"))
    assert data["articles"] == 36


def test_ingest_endpoint_reports_rejections(client):
    records = [
        {
            "id": "extra-1",
            "newspaper": {"name": "G", "country": "UY", "pages": 2},
            "date": "1812",
            "text": "Una tormenta breve.",
        },
        {"id": "bad-1", "newspaper": {"name": "G", "country": "UY", "pages": 2}, "date": "1812", "text": " "},
    ]
    data = _data(client.post("/articles:ingest", json={"records": records}))
    assert data["accepted"] == 1
    assert data["rejected"][0]["reason"] == "empty raw_text"


def test_articles_listing_with_filters_and_pagination(client):
    data = _data(client.get("/articles", params={"country": "UY", "period": "1800-1810", "limit": 5}))
    assert data["total"] == 9
    assert len(data["items"]) == 5
    rest = _data(client.get("/articles", params={"country": "UY", "period": "1800-1810",
                                                 "limit": 5, "cursor": data["next_cursor"]}))
    assert len(rest["items"]) == 4
    assert "next_cursor" not in rest


def test_article_not_found_code(client):
    error = _data(client.get("/articles/unknown"), 404)
    assert error["code"] == "not_found"


def test_article_content_tree_view(client):
    data = _data(client.get("/articles/uy-001", params={"view": "content_tree"}))
    tree = data["content_tree"]
    tags = [node["tag"] for node in tree["sentences"][0]["children"]]
    assert tags[:3] == ["NN", "IN", "GPE"]


def test_query_endpoint_shows_localized_plan(client):
    data = _data(client.post("/query", json={"q": "tormenta", "localize": "MX"}))
    assert data["plan"]["localized"]["MX"] == "(tormenta OR chaparrón)"
    assert data["results"], "tormenta must match fixture articles"


def test_query_parse_error_envelope(client):
    error = _data(client.post("/query", json={"q": "a AND ("}), 400)
    assert error["code"] == "parse_error"


def test_query_execute_variant(client):
    body = {"q": "tormenta", "localize": ["UY"], "execute": "localized:UY"}
    data = _data(client.post("/query", json=body))
    assert data["executed"] == "(tormenta OR chubasco)"
    executed_ids = {r["article_id"] for r in data["results"]}
    original = {r["article_id"] for r in _data(client.post("/query", json={"q": "tormenta"}))["results"]}
    assert original <= executed_ids


def test_service_results_equal_direct_calls(client, workspace):
    # golden equivalence: the endpoint is a thin adapter
    body = {"q": "tormenta AND montevideo"}
    via_http = _data(client.post("/query", json=body))["results"]
    from hemeroclim.query import evaluate

    direct = evaluate(
        parse_query("tormenta AND montevideo"),
        workspace.store.index,
        workspace.events,
        store=workspace.store,
    )
    assert [(r["article_id"], r["score"]) for r in via_http] == direct


def test_curation_flow_over_http(client):
    _data(client.post("/pipeline/run", json={}))
    tasks = _data(client.get("/curation/tasks", params={"limit": 100}))["items"]
    task = next(t for t in tasks if t["article_id"] == "uy-001")
    task_id = task["id"]
    trigger_span = task["candidate"]["trigger_terms"][0][1]
    trigger_key = f"{trigger_span[0]}:{trigger_span[1]}:{trigger_span[2]}"
    location_key = next(iter(task["proposed_geo"]))
    entry = next(e for e in task["proposed_geo"][location_key] if e["country"] == "UY")

    for kind, payload in (
        ("correct_term", {"span": trigger_key, "keep": True}),
        ("confirm_location", {"span": location_key, "entry": entry}),
        ("set_date", {"date": "1805-06"}),
        ("add_damage", {"term": "inundación"}),
    ):
        updated = _data(
            client.post(f"/curation/tasks/{task_id}/actions", json={"kind": kind, "payload": payload})
        )
        assert updated["status"] == "in_review"

    event = _data(client.post(f"/curation/tasks/{task_id}:promote"))
    assert event["scope"] == [
        {"locationName": "Montevideo", "lon": -56.19, "lat": -34.9, "country": "UY"}
    ]
    listed = _data(client.get("/events"))
    assert listed["total"] == 1


def test_version_conflict_code(client):
    _data(client.post("/pipeline/run", json={}))
    tasks = _data(client.get("/curation/tasks", params={"limit": 100}))["items"]
    task = next(t for t in tasks if t["article_id"] == "uy-002")
    span = task["candidate"]["trigger_terms"][0][1]
    key = f"{span[0]}:{span[1]}:{span[2]}"
    body = {"kind": "correct_term", "payload": {"span": key, "keep": True}, "version": 0}
    _data(client.post(f"/curation/tasks/{task['id']}/actions", json=body))
    error = _data(client.post(f"/curation/tasks/{task['id']}/actions", json=body), 409)
    assert error["code"] == "version_conflict"


def test_promote_incomplete_lists_missing_slots(client):
    _data(client.post("/pipeline/run", json={}))
    tasks = _data(client.get("/curation/tasks", params={"limit": 100}))["items"]
    task_id = tasks[0]["id"]
    error = _data(client.post(f"/curation/tasks/{task_id}:promote"), 422)
    assert error["code"] == "validation_failed"
    assert set(error["details"]) == {"trigger", "location", "date"}


def test_vocab_endpoints(client):
    _data(client.post("/vocab/terms", json={"term": "refusilo", "country": "UY", "register": "colloquial"}))
    _data(
        client.post(
            "/vocab/links",
            json={"source": "refusilo", "target": "relámpago", "kind": "scientific_equivalent", "country": "UY"},
        )
    )
    entries = _data(client.get("/vocab/terms", params={"country": "UY"}))
    assert any(e["term"] == "refusilo" for e in entries)
    expansion = _data(client.get("/vocab/terms", params={"term": "tormenta"}))
    assert expansion["synonyms"] == ["tempestad"]


def test_tf_endpoint_top_terms(client):
    data = _data(client.get("/vocab/tf", params={"country": "UY", "top": 5}))
    assert len(data["top"]) == 5
    assert data["docs"] and data["terms"]
    assert len(data["normalized"]) == len(data["docs"])


def test_heatmap_endpoint_equals_direct_export(client, workspace):
    direct = export_heatmap(heatmap(workspace.events))
    via_http = _data(client.get("/events/heatmap"))
    assert via_http == direct


def test_evolution_endpoint(client):
    data = _data(client.get("/events/evolution", params={"term": "tormenta", "date_from": 1800, "date_to": 1819, "country": "UY"}))
    assert data["buckets"] == [[1800, 1809], [1810, 1819]]
    assert "UY" in data["series"]


def test_auth_token_enforced(workspace):
    from hemeroclim.service import create_app

    client = TestClient(create_app(workspace, auth_token="secreto"))
    assert client.get("/articles").status_code == 401
    assert client.get("/healthz").status_code == 200
    assert client.get("/articles", headers={"x-auth-token": "secreto"}).status_code == 200


def test_tf_endpoint_equals_direct_build(client, workspace):
    from hemeroclim.corpus import ArticleFilter
    from hemeroclim.vocab import build_tf_matrix, top_terms

    via_http = _data(client.get("/vocab/tf", params={"country": "MX", "top": 7}))
    matrix = build_tf_matrix(
        workspace.store, ArticleFilter(country="MX"), stop_terms=workspace.stoplist
    )
    assert via_http["docs"] == matrix.docs
    assert via_http["terms"] == matrix.terms
    assert via_http["counts"] == matrix.counts.tolist()
    assert [tuple(t) for t in via_http["top"]] == top_terms(matrix, 7)
