import numpy as np
import pytest
from fastapi.testclient import TestClient

from jetcones.gridcheck import GridFunction
from jetcones.service.app import app

client = TestClient(app)


def _grid_payload(f, m=32, h=1.0 / 32.0):
    origin = (-0.5 + h / 2, -0.5 + h / 2)
    grid = GridFunction.from_callable(f, origin, h, (m, m))
    return {
        "origin": [float(v) for v in grid.origin],
        "spacing": [float(v) for v in grid.spacing],
        "values": grid.values.tolist(),
    }


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_analyze_endpoint():
    r = client.post(
        "/analyze",
        json={"spec": {"n": 2, "kind": "builtin_laplacian"}, "seed": 3, "samples": 2},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["complete"] is True
    assert body["witnesses"]["edge_dim"] == 5
    assert body["seed"] == 3


def test_analyze_rejects_unknown_keys():
    r = client.post(
        "/analyze",
        json={"spec": {"n": 2, "kind": "builtin_laplacian", "bogus": 1}, "seed": 3},
    )
    assert r.status_code == 422


def test_analyze_timings_opt_in():
    req = {"spec": {"n": 2, "kind": "builtin_laplacian"}, "seed": 3, "samples": 1}
    plain = client.post("/analyze", json=req).json()
    assert plain["timings"] is None
    req["include_timings"] = True
    timed = client.post("/analyze", json=req).json()
    assert timed["timings"]["total_seconds"] > 0.0


def test_cones_endpoint_quadrant():
    r = client.post(
        "/cones",
        json={
            "set": {
                "d": 2,
                "kind": "halfspace_list",
                "halfspaces": [{"normal": [1.0, 0.0]}, {"normal": [0.0, 1.0]}],
            },
            "seed": 5,
            "samples": 4,
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["bipolar_ok"] is True
    assert body["witnesses"]["polar"]["generators"] == [[1.0, 0.0], [0.0, 1.0]]


def test_cones_empty_set_is_400():
    r = client.post(
        "/cones",
        json={
            "set": {
                "d": 2,
                "kind": "halfspace_list",
                "halfspaces": [
                    {"normal": [1.0, 0.0], "offset": 1.0},
                    {"normal": [-1.0, 0.0], "offset": 1.0},
                ],
            },
            "seed": 1,
        },
    )
    assert r.status_code == 400
    assert "empty" in r.json()["detail"]


def test_check_endpoint_with_bottom_marker():
    payload = _grid_payload(lambda x, y: x**2 + y**2)
    payload["values"][3][4] = "-inf"
    r = client.post(
        "/check",
        json={
            "spec": {"n": 2, "kind": "builtin_laplacian"},
            "grid": payload,
            "mode": "c2",
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["ok"] is True
    assert body["witnesses"]["skipped"] > 0


def test_check_dimension_mismatch_is_400():
    r = client.post(
        "/check",
        json={
            "spec": {"n": 3, "kind": "builtin_laplacian"},
            "grid": _grid_payload(lambda x, y: x + y),
            "mode": "c2",
        },
    )
    assert r.status_code == 400


def test_regularize_endpoint():
    spike = np.zeros((32, 32))
    spike[10, 12] = 3.0
    h = 1.0 / 32.0
    r = client.post(
        "/regularize",
        json={
            "grid": {
                "origin": [-0.5, -0.5],
                "spacing": h,
                "values": spike.tolist(),
            },
            "radii": [0.2, 0.1],
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"] == {"monotone": True, "dominates": True}
    vals = np.array(body["witnesses"]["limsup"]["values"], dtype=float)
    assert vals.max() == 3.0
    assert body["witnesses"]["limsup"]["shape"] == [32, 32]


def test_linear_endpoint_negated_member_fails_coherently():
    r = client.post(
        "/linear",
        json={
            "operator": {"n": 2, "a": [[1.0, 0.0], [0.0, 1.0]]},
            "battery": "neg:paraboloid",
            "seed": 4,
        },
    )
    assert r.status_code == 200
    body = r.json()
    member = body["witnesses"]["members"]["paraboloid_negated"]
    assert member["verdicts"] == {
        "classical": False,
        "viscosity": False,
        "distributional": False,
    }
    assert body["verdicts"]["all_agree"] is True


def test_linear_degenerate_operator_is_400():
    r = client.post(
        "/linear",
        json={"operator": {"n": 2, "a": [[1e-12, 0.0], [0.0, 1.0]]}, "seed": 1},
    )
    assert r.status_code == 400


def test_decompose_endpoint():
    r = client.post(
        "/decompose",
        json={
            "spec": {"n": 2, "kind": "builtin_laplacian"},
            "jets": [
                {"r": 0.0, "p": [0.0, 0.0], "a": [1.0, 0.0, 1.0]},
                {"r": 0.0, "p": [0.0, 0.0], "a": [-1.0, 0.0, -2.0]},
            ],
            "seed": 6,
            "samples": 4,
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["ok"] is True
    assert body["witnesses"]["outside"][0]["excluded"] is True


def test_decompose_non_sampleable_spec_is_400():
    r = client.post(
        "/decompose",
        json={
            "spec": {"n": 2, "kind": "builtin_parabola_a9"},
            "jets": [{"r": 0.0, "p": [0.0, 0.0], "a": [1.0, 0.0, 1.0]}],
            "seed": 1,
        },
    )
    assert r.status_code == 400


@pytest.mark.parametrize("route", ["/analyze", "/cones", "/check", "/decompose"])
def test_missing_required_fields_are_422(route):
    r = client.post(route, json={})
    assert r.status_code == 422
