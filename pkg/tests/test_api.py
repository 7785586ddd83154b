import pytest
from fastapi.testclient import TestClient

from main import app

client = TestClient(app)


def test_health():
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "service": "infinitesimal-workbench", "version": "1.0.0"}


def test_root_lists_verbs():
    body = client.get("/").json()
    assert body["backends"] == ["lc", "omega", "ratfunc"]
    assert body["verbs"]["ucont"] == ["lc"]


def test_derive():
    response = client.post("/calculus/derive", json={"args": ["x^2"], "at": "3", "backend": "lc"})
    assert response.status_code == 200
    report = response.json()
    assert report["operation"] == "derive"
    assert report["values"]["derivative"] == "6"


def test_compare_undecided_is_a_verdict():
    response = client.post("/fields/compare", json={"args": ["(-1)^n", "0"], "backend": "omega"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "Undecided"


def test_hyperfinite_sum():
    response = client.post("/hyperfinite/sum", json={"args": ["1"]})
    assert response.status_code == 200
    assert response.json()["verdict"] == "Infinite"


@pytest.mark.parametrize(
    "path, body, status, error",
    [
        ("/calculus/derive", {"args": ["2x"], "at": "1"}, 400, "ParseError"),
        ("/fields/classify", {"args": ["(-1)^n"], "backend": "omega"}, 409, "Undecided"),
        ("/calculus/ucont", {"args": ["x"], "interval": ["0", "1"], "backend": "omega"}, 501, "UnsupportedBackend"),
    ],
)
def test_engine_errors(path, body, status, error):
    response = client.post(path, json=body)
    assert response.status_code == status
    payload = response.json()
    assert payload["status"] == "error"
    assert payload["error"] == error
    assert set(payload) == {"status", "error", "message", "remedy"}


def test_request_validation():
    response = client.post("/calculus/ivt", json={"args": ["x"], "interval": ["0"]})
    assert response.status_code == 422


def test_unknown_endpoint():
    response = client.get("/nowhere")
    assert response.status_code == 404
    assert response.json()["message"] == "Endpoint not found"
