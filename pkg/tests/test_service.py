"""HTTP service endpoints and error-kind mapping."""

import pytest
from starlette.testclient import TestClient

from cpwbench.service import create_app
from tests.test_configio import VALID_DESIGN, VALID_INK, VALID_LAYOUT


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


class TestHealth:
    def test_reports_version(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["version"]


class TestDesign:
    def test_valid_design(self, client):
        resp = client.post("/design", json={"config": VALID_DESIGN})
        assert resp.status_code == 200
        body = resp.json()
        assert body["effective_permittivity"] == pytest.approx(2.1)
        assert body["guide_wavelength_m"] == pytest.approx(86.25e-3, abs=0.15e-3)
        assert body["seed_length_m"] == pytest.approx(body["guide_wavelength_m"] / 4)
        assert body["synthesized_gap_m"] > 0

    def test_config_error_kind(self, client):
        resp = client.post("/design", json={"config": "nonsense"})
        assert resp.status_code == 422
        assert resp.json()["kind"] == "config"

    def test_infeasible_kind(self, client):
        cfg = VALID_DESIGN.replace("50 ohm", "10000 ohm")
        resp = client.post("/design", json={"config": cfg})
        assert resp.status_code == 422
        assert resp.json()["kind"] == "infeasible"


class TestInk:
    def test_report(self, client):
        resp = client.post("/check-ink", json={"config": VALID_INK})
        assert resp.status_code == 200
        body = resp.json()
        assert body["ohnesorge"] == pytest.approx(0.0309, abs=1e-3)
        assert body["printable"] is False
        assert {c["name"] for c in body["checks"]} == {
            "ohnesorge", "viscosity", "surface_tension", "contact_angle",
        }

    def test_bad_config(self, client):
        resp = client.post("/check-ink", json={"config": "viscosity = fish"})
        assert resp.status_code == 422
        assert resp.json()["kind"] == "config"


class TestSimulateValidation:
    def test_bad_layout_maps_to_config(self, client):
        resp = client.post("/simulate", json={"config": "pattern_width = -1 mm"})
        assert resp.status_code == 422
        assert resp.json()["kind"] == "config"

    def test_request_schema_enforced(self, client):
        resp = client.post("/simulate", json={"config": VALID_LAYOUT, "f_points": 1})
        assert resp.status_code == 422


class TestSweepValidation:
    def test_too_few_values(self, client):
        resp = client.post(
            "/sweep",
            json={"config": VALID_LAYOUT, "parameter": "pattern_width", "values": [1e-3]},
        )
        assert resp.status_code == 422

    def test_unknown_parameter_maps_to_config(self, client):
        resp = client.post(
            "/sweep",
            json={
                "config": VALID_LAYOUT,
                "parameter": "wingspan",
                "values": [1e-3, 2e-3, 3e-3],
            },
        )
        assert resp.status_code == 422
        assert resp.json()["kind"] == "config"
