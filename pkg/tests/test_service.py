import numpy as np
import pytest
from fastapi.testclient import TestClient

from hyperderiv.service import app, matrix_from_model, matrix_to_model

client = TestClient(app)


def test_health_and_suites():
    h = client.get("/health").json()
    assert h == {"status": "ok", "schema": "hyperderiv/1"}
    suites = client.get("/suites").json()["suites"]
    assert {"symbolic", "invariance", "bch", "all"} <= set(suites)


def test_parse_endpoint():
    r = client.post("/parse", json={"text": "sym(A,B,1,1)"})
    assert r.status_code == 200
    body = r.json()["poly"]
    assert body["pretty"] == "A*B + B*A"
    assert body["terms"] == [
        {"word": ["A", "B"], "coeff": "1"},
        {"word": ["B", "A"], "coeff": "1"},
    ]


def test_parse_endpoint_syntax_error():
    r = client.post("/parse", json={"text": "A*("})
    assert r.status_code == 422
    detail = r.json()["detail"]
    assert detail["error"] == "syntax" and detail["offset"] == 3


def test_apply_endpoint_and_domain_error():
    r = client.post("/apply", json={"op": "darrow[A->B]", "to": "A*B*A"})
    assert r.json()["result"]["pretty"] == "A*B*B + B*B*A"
    r = client.post("/apply", json={"op": "deltaarrow[A->B]", "to": "A*B - B*A"})
    assert r.status_code == 422
    assert r.json()["detail"]["error"] == "domain"
    r = client.post("/apply", json={"op": "wat", "to": "A"})
    assert r.status_code == 400


def test_derive_endpoint():
    r = client.post("/derive", json={"f": "x^2", "order": 1})
    body = r.json()
    assert body["hyper"] == "2*Â - δ̂1"
    assert body["expanded"]["pretty"] == "A*dA + dA*A"


def test_taylor_endpoint():
    r = client.post("/taylor", json={"f": "x^2", "order": 2})
    pretties = [c["pretty"] for c in r.json()["coefficients"]]
    assert pretties == ["A*A", "A*B + B*A", "B*B"]


def test_matrix_model_round_trip():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(matrix_from_model(matrix_to_model(a)), a)
    with pytest.raises(ValueError):
        matrix_from_model([[[1.0, 0.0]], [[0.0, 0.0]]])


def test_bch_endpoint():
    payload = {
        "variant": "symmetric",
        "nodes": 32,
        "matrices": [
            [[[0.1, 0.0], [0.0, 0.05]], [[0.0, 0.0], [-0.1, 0.0]]],
            [[[0.0, 0.1], [0.05, 0.0]], [[0.05, 0.0], [0.0, -0.1]]],
        ],
    }
    r = client.post("/bch", json=payload)
    assert r.status_code == 200
    assert r.json()["residual"] < 1e-10
    payload["matrices"].append(payload["matrices"][0])
    r = client.post("/bch", json=payload)
    assert r.status_code == 400  # symmetric wants exactly two matrices


def test_verify_endpoint_schema():
    r = client.post("/verify", json={"suite": "formulaA", "dims": [2], "trials": 2})
    body = r.json()
    assert body["schema"] == "hyperderiv/1"
    assert body["all_pass"] is True
    rep = body["reports"][0]
    assert set(rep) == {
        "identity", "trials", "dim", "seed", "max_residual", "tol", "pass", "runtime_ms",
    }
    r = client.post("/verify", json={"suite": "unknown-thing"})
    assert r.status_code == 404
