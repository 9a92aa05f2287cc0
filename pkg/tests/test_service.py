import json

import pytest
from fastapi.testclient import TestClient

from floquet_hb import jobs
from floquet_hb._version import __version__
from floquet_hb.schemas import JobConfig
from floquet_hb.service import create_app

FAST_CONFIG = {
    "problem": {"name": "mathieu", "params": {"omega": 1.0, "alpha": 0.5}},
    "method": "hb",
    "n": 2,
    "steps": 500,
}


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


def test_catalog(client):
    resp = client.get("/catalog")
    assert resp.status_code == 200
    entries = resp.json()["problems"]
    assert entries["mathieu"] == ["omega", "alpha"]
    assert entries["commuting_example"] == []
    assert entries["marcus_yamabe"] == []


def test_solve_matches_direct_runner(client):
    resp = client.post("/solve", json=FAST_CONFIG)
    assert resp.status_code == 200
    assert resp.headers["content-type"] == "application/json"
    expected = jobs.report_json(jobs.run_job(JobConfig.model_validate(FAST_CONFIG)))
    assert resp.content == expected.encode()


def test_solve_rejects_invalid_model(client):
    resp = client.post("/solve", json={**FAST_CONFIG, "n": 0})
    assert resp.status_code == 422

    resp = client.post("/solve", json={**FAST_CONFIG, "turbo": True})
    assert resp.status_code == 422


def test_solve_rejects_sweep_config(client):
    cfg = {**FAST_CONFIG, "sweep": {"param": "alpha", "from": 0.1, "to": 1.0, "count": 3}}
    resp = client.post("/solve", json=cfg)
    assert resp.status_code == 422
    assert "sweep" in resp.json()["detail"]


def test_sweep_endpoint(client):
    cfg = {**FAST_CONFIG, "sweep": {"param": "alpha", "from": 0.1, "to": 1.0, "count": 3}}
    resp = client.post("/sweep", json=cfg)
    assert resp.status_code == 200
    report = json.loads(resp.content)
    assert [row["param"]["alpha"] for row in report["rows"]] == pytest.approx(
        [0.1, 0.55, 1.0]
    )

    resp = client.post("/sweep", json=FAST_CONFIG)  # no sweep block
    assert resp.status_code == 422


def test_export_endpoint(client):
    body = {"config": {**FAST_CONFIG, "steps": 320}, "periods": 1, "points_per_period": 64}
    resp = client.post("/export", json=body)
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    expected = jobs.export_solution(
        JobConfig.model_validate({**FAST_CONFIG, "steps": 320}),
        periods=1,
        points_per_period=64,
    )
    assert resp.text == expected
    assert resp.text.splitlines()[0] == "t,x_a_re,x_a_im,x_ref_re,x_ref_im,abs_error"


def test_export_rejects_sweep_config(client):
    cfg = {**FAST_CONFIG, "sweep": {"param": "alpha", "from": 0.1, "to": 1.0, "count": 3}}
    resp = client.post("/export", json={"config": cfg})
    assert resp.status_code == 422


def test_export_maps_solver_failure_to_409(client, monkeypatch):
    def boom(*args, **kwargs):
        raise ValueError("synthetic failure")

    monkeypatch.setattr(jobs.hb, "select_exponents", boom)
    resp = client.post("/export", json={"config": FAST_CONFIG})
    assert resp.status_code == 409
    assert "synthetic failure" in resp.json()["detail"]
