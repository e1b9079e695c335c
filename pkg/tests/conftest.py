"""
Pytest configuration and fixtures for testing
"""
import json

import numpy as np
import pytest

from pconvex.config import reset_settings
from pconvex.core.types import GeneratorSet, PBody
from pconvex.services.gluskin_service import RandomSpaceSpec, random_gluskin_space
from pconvex.services.norm_service import PNormedSpace
from pconvex.utils.cache_manager import reset_cache_manager
from pconvex.utils.performance_monitor import reset_performance_monitor


@pytest.fixture(autouse=True)
def fresh_singletons(monkeypatch):
    """Every test starts from default settings and empty caches"""
    for var in ("PCONVEX_THREADS", "PCONVEX_TOL", "PCONVEX_GAUGE_BUDGET",
                "PCONVEX_CACHE_MAX_SIZE", "PCONVEX_LOG_LEVEL", "SOURCE_DATE_EPOCH"):
        monkeypatch.delenv(var, raising=False)
    reset_settings()
    reset_cache_manager()
    reset_performance_monitor()
    yield
    reset_settings()
    reset_cache_manager()
    reset_performance_monitor()


@pytest.fixture
def lp_half_body():
    """Unit ball of l_{1/2}^2: p-conv{+-e_1, +-e_2}"""
    return PBody(GeneratorSet(np.eye(2)), 0.5)


@pytest.fixture
def lp_half_space(lp_half_body):
    return PNormedSpace(lp_half_body, name="l_0.5^2")


@pytest.fixture
def three_point_generators():
    """e_1, e_2 and (e_1 + e_2)/2"""
    return GeneratorSet(np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]))


@pytest.fixture
def gluskin_2d():
    return random_gluskin_space(RandomSpaceSpec(2, 0.5, 42))


@pytest.fixture
def gluskin_spaces():
    """Ten random Gluskin spaces, n in {2, 3}"""
    return [random_gluskin_space(RandomSpaceSpec(2 + k % 2, 0.5, 1000 + k)) for k in range(10)]


@pytest.fixture
def body_file(tmp_path):
    """Writes the l_{1/2}^2 body file and returns its path"""
    path = tmp_path / "l_half_2.json"
    path.write_text(json.dumps({
        "p": 0.5,
        "dim": 2,
        "name": "l_half_2",
        "generators": [[1.0, 0.0], [0.0, 1.0]]
    }), encoding="utf-8")
    return path


@pytest.fixture
def three_point_body_file(tmp_path):
    path = tmp_path / "three_point.json"
    path.write_text(json.dumps({
        "p": 0.5,
        "dim": 2,
        "generators": [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]
    }), encoding="utf-8")
    return path


@pytest.fixture
def write_json_file(tmp_path):
    """Factory writing an arbitrary JSON document into tmp_path"""
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path
    return _write


# Configuration for pytest
def pytest_configure(config):
    """Configure pytest with custom markers"""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )
    config.addinivalue_line(
        "markers", "edge_case: marks tests as edge case tests"
    )


# Pytest collection hooks
def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers automatically"""
    for item in items:
        # Add markers based on test file names
        if "test_integration" in item.nodeid:
            item.add_marker(pytest.mark.integration)
        elif "test_edge_cases" in item.nodeid or "test_error_handling" in item.nodeid:
            item.add_marker(pytest.mark.edge_case)
        else:
            item.add_marker(pytest.mark.unit)

        # Acceptance-scale runs
        if "acceptance" in item.name or "test_large" in item.name:
            item.add_marker(pytest.mark.slow)
