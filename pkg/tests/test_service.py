"""HTTP endpoints: request validation, payload shapes, error mapping."""

import pytest
from fastapi.testclient import TestClient

from flatfiber.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    assert body["schema_tag"] == "flatfiber/1"


def test_catalog_list(client):
    body = client.get("/catalog").json()
    by_name = {g["name"]: g for g in body["groups"]}
    assert len(by_name) == 27
    assert by_name["p1"]["has_model_data"]
    assert not by_name["p6m"]["has_model_data"]
    assert by_name["p6m"]["point_group_order"] == 12


def test_catalog_show_and_missing(client):
    body = client.get("/catalog/pg_alt").json()
    assert body["name"] == "pg_alt"
    assert body["lattice"] == [["1", "0"], ["0", "2"]]
    assert client.get("/catalog/p5").status_code == 404


def test_normals(client):
    resp = client.post("/normal-subgroups", json={"group": "pm", "fiber_dim": 1, "bound": 1})
    assert resp.status_code == 200
    subs = resp.json()["subgroups"]
    assert len(subs) == 2
    assert sorted(s["point_part_count"] for s in subs) == [1, 2]


def test_analyze_complete_pair(client):
    resp = client.post("/analyze", json={"pair": {"group": "pm", "span": [[1, 0]]}})
    assert resp.status_code == 200
    body = resp.json()
    assert body["complete"] and body["theorem1_ok"]
    assert body["fiber_dimension"] == 1 and body["base_dimension"] == 1
    assert len(body["base"]["coset_reps"]) == 2  # the mirror survives into the base


def test_analyze_incomplete_subgroup(client):
    gens = [{"matrix": [["1", "0"], ["0", "1"]], "translation": ["2", "0"]}]
    resp = client.post(
        "/analyze", json={"pair": {"group": "pm", "subgroup_generators": gens}}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["theorem1_ok"] and not body["complete"]
    assert body["fiber"] is None


def test_analyze_rejects_non_invariant_span(client):
    resp = client.post("/analyze", json={"pair": {"group": "p4", "span": [[1, 0]]}})
    assert resp.status_code == 422
    assert "invariant" in resp.json()["detail"]


def test_pair_spec_needs_exactly_one_form(client):
    resp = client.post("/analyze", json={"pair": {"group": "pm"}})
    assert resp.status_code == 422


def test_pair_iso_finds_glide_conjugation(client):
    body = {
        "first": {"group": "pg", "span": [[0, 1]]},
        "second": {"group": "pg_alt", "span": [[1, 0]]},
    }
    resp = client.post("/pair-iso", json=body)
    assert resp.status_code == 200
    out = resp.json()
    assert out["verdict"] == "isomorphic"
    assert out["conjugator"]["matrix"] == [["0", "1"], ["2", "0"]]


def test_pair_iso_mirror_versus_glide(client):
    body = {
        "first": {"group": "pm", "span": [[1, 0]]},
        "second": {"group": "pg", "span": [[1, 0]]},
    }
    out = client.post("/pair-iso", json=body).json()
    assert out["verdict"] == "not-found-within-bounds"
    assert out["conjugator"] is None


def test_cohomology_mirror_pair(client):
    resp = client.post("/cohomology", json={"pair": {"group": "pm", "span": [[1, 0]]}})
    body = resp.json()
    assert body["h1_torus"]["invariant_factors"] == [2, 2]
    assert body["kappa_cokernel"]["structure"]["invariant_factors"] == [2, 2]
    assert body["h1_torus_description"] == "Z/2 x Z/2"


def test_cohomology_translation_pair(client):
    resp = client.post("/cohomology", json={"pair": {"group": "p1", "span": [[1, 0]]}})
    body = resp.json()
    assert body["h1_torus"]["divisible_rank"] == 1
    assert body["h1_span"]["divisible_rank"] == 1
    assert body["h1_span"]["divisible_symbol"] == "Q"


def test_classify_and_verify_round_trip(client):
    resp = client.post(
        "/classify",
        json={"base": "p1_1d", "fiber": "p1_1d", "bound": 2, "pool": ["p1", "pg"]},
    )
    assert resp.status_code == 200
    payload = resp.json()
    assert len(payload["records"]) == 2
    assert not payload["indeterminate"]
    total = sum(len(r["certificates"]) for r in payload["records"])
    check = client.post("/verify", json=payload)
    assert check.status_code == 200
    assert check.json()["certificates_checked"] == total


def test_classify_rejects_model_without_data(client):
    resp = client.post("/classify", json={"base": "pm", "fiber": "p1_1d"})
    assert resp.status_code == 422
    assert "automorphism data" in resp.json()["detail"]


def test_verify_rejects_wrong_schema(client):
    resp = client.post("/verify", json={"schema": "flatfiber/0"})
    assert resp.status_code == 422
