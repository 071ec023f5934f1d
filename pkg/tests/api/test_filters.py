"""
Tests for the filter design endpoint.

Covers a successful design summary and the rejection of invalid configurations.
"""

import math

import pytest
from fastapi.testclient import TestClient

from app.main import app
from tests.utils import DEFAULT_FS, DEFAULT_RADIUS

client = TestClient(app)


class TestFiltersAPI:
    """Test the filters API endpoints."""

    def test_design_summary(self):
        """A valid configuration returns one summary per mode."""
        payload = {
            "radius": DEFAULT_RADIUS,
            "sample_rate": DEFAULT_FS,
            "fir_length": 512,
            "max_order": 2,
        }

        response = client.post("/api/v1/filters/design", json=payload)

        assert response.status_code == 200
        summary = response.json()
        assert summary["modeling_delay"] == 256
        assert [mode["mode"] for mode in summary["modes"]] == [0, 1, 2]
        assert summary["config"]["truncation_order"] == 42
        for mode in summary["modes"]:
            assert math.isfinite(mode["peak_gain_db"])
            assert mode["valid_band_hz"] is not None

    @pytest.mark.parametrize(
        "overrides",
        [
            {"fir_length": 1000},
            {"radius": -0.1},
            {"max_order": 4, "truncation_order": 10},
        ],
    )
    def test_invalid_config(self, overrides):
        """Configurations violating the filter invariants are rejected."""
        payload = {"radius": DEFAULT_RADIUS, "fir_length": 512, "max_order": 2, **overrides}

        response = client.post("/api/v1/filters/design", json=payload)

        assert response.status_code == 422
