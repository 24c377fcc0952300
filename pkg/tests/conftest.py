import importlib.util
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = REPO_ROOT / "scenarios"


def _load_package():
    """Import src/ as robust_localization when the package is not installed"""
    try:
        import robust_localization  # noqa: F401
        return
    except ImportError:
        pass
    spec = importlib.util.spec_from_file_location(
        "robust_localization",
        str(REPO_ROOT / "src" / "__init__.py"),
        submodule_search_locations=[str(REPO_ROOT / "src")],
    )
    module = importlib.util.module_from_spec(spec)
    sys.modules["robust_localization"] = module
    spec.loader.exec_module(module)


_load_package()
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Isolate every test from ROBLOC_* variables and cached settings"""
    from robust_localization.config import reset_settings

    for name in ("ROBLOC_OUTPUT_DIR", "ROBLOC_MAX_PIVOTS", "ROBLOC_VERTEX_LIMIT",
                 "ROBLOC_SEARCH_BUDGET", "ROBLOC_WORKERS", "ROBLOC_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("OTEL_ENABLED", "false")
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def scenario_path():
    def path(name: str) -> Path:
        return SCENARIOS / f"{name}.json"

    return path
