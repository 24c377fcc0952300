import importlib.util
import json
from pathlib import Path

from fastapi import FastAPI
from fastapi.testclient import TestClient

REPO_ROOT = Path(__file__).resolve().parents[1]


def load_scenarios_router():
    mod_path = REPO_ROOT / "api_layer" / "scenarios.py"
    spec = importlib.util.spec_from_file_location("scenarios_mod", str(mod_path))
    mod = importlib.util.module_from_spec(spec)
    assert spec and spec.loader
    spec.loader.exec_module(mod)
    return mod.router


def make_client() -> TestClient:
    app = FastAPI()
    app.include_router(load_scenarios_router(), prefix="/api")
    return TestClient(app)


def binomial() -> dict:
    return json.loads((REPO_ROOT / "scenarios" / "binomial.json").read_text())


def test_lists_commands():
    resp = make_client().get("/api/scenarios/commands")
    assert resp.status_code == 200
    names = [c["name"] for c in resp.json()["data"]]
    assert "superhedge" in names
    assert names == sorted(names)


def test_runs_a_command():
    resp = make_client().post("/api/scenarios/superhedge", json={"scenario": binomial()})
    assert resp.status_code == 200
    body = resp.json()
    assert body["exit_code"] == 0
    assert body["report"]["sections"][0]["rows"][0][1] == "1/3"


def test_verdict_failure_is_not_an_http_error():
    doc = binomial()
    doc["markets"]["S"]["s1"] = [[2, "3/2"]]
    resp = make_client().post("/api/scenarios/na-check", json={"scenario": doc})
    assert resp.status_code == 200
    assert resp.json()["exit_code"] == 2


def test_unknown_command_is_404():
    resp = make_client().post("/api/scenarios/hedge-everything", json={})
    assert resp.status_code == 404


def test_bad_scenario_is_400():
    doc = binomial()
    doc["variables"]["call"] = ["0.5", 0]
    resp = make_client().post("/api/scenarios/superhedge", json={"scenario": doc})
    assert resp.status_code == 400
    assert "body.scenario:variables" in resp.json()["detail"]


def test_missing_scenario_is_400():
    resp = make_client().post("/api/scenarios/superhedge", json={})
    assert resp.status_code == 400


def test_scenario_free_command():
    resp = make_client().post("/api/scenarios/bubble-demo", json={"truncation": 3})
    assert resp.status_code == 200
    assert resp.json()["exit_code"] == 0
