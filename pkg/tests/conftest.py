import pytest
import logging

from app.core.radial import design_equalizers
from app.schemas.geometry import ArrayGeometry
from app.schemas.radial import RadialConfig
from tests.utils import DEFAULT_FS, DEFAULT_RADIUS, FIR_LENGTH

# Configure logging for tests
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

# Add pytest markers for different test types
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line(
        "markers", "integration: mark test as end-to-end test (simulate, encode, render)"
    )
    config.addinivalue_line(
        "markers", "unit: mark test as unit test (default)"
    )
    config.addinivalue_line(
        "markers", "api: mark test as HTTP service test"
    )


def pytest_collection_modifyitems(config, items):
    """Automatically mark tests based on file path."""
    for item in items:
        path = str(item.fspath)
        if "integration" in path:
            item.add_marker(pytest.mark.integration)
        elif "api" in path:
            item.add_marker(pytest.mark.api)
        elif "unit" in path:
            item.add_marker(pytest.mark.unit)


@pytest.fixture(scope="session")
def ring16() -> ArrayGeometry:
    """16 microphones on a head-sized sphere."""
    return ArrayGeometry(radius=DEFAULT_RADIUS, mic_count=16)


@pytest.fixture(scope="session")
def bank4():
    """Order-4 equalizer bank matching ``ring16`` at 48 kHz."""
    cfg = RadialConfig(
        radius=DEFAULT_RADIUS, sample_rate=DEFAULT_FS, fir_length=FIR_LENGTH, max_order=4
    )
    return design_equalizers(cfg)
