import pytest

from robust_localization.config import Settings, get_settings, ordered_map, reset_settings, settings_scope
from robust_localization.errors import ConfigurationError


def test_defaults():
    settings = get_settings()
    assert settings.max_pivots == 10000
    assert settings.workers == 1
    assert settings.output_dir == "reports"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("ROBLOC_MAX_PIVOTS", "50")
    monkeypatch.setenv("ROBLOC_LOG_LEVEL", "debug")
    reset_settings()
    settings = get_settings()
    assert settings.max_pivots == 50
    assert settings.log_level == "DEBUG"


@pytest.mark.parametrize("raw", ["many", "0", "-3"])
def test_malformed_environment(monkeypatch, raw):
    monkeypatch.setenv("ROBLOC_WORKERS", raw)
    reset_settings()
    with pytest.raises(ConfigurationError):
        get_settings()


def test_with_overrides_ignores_none():
    settings = Settings().with_overrides(max_pivots=None, workers=4)
    assert settings.max_pivots == 10000
    assert settings.workers == 4
    with pytest.raises(ConfigurationError):
        Settings().with_overrides(colour="red")


def test_settings_scope_is_restored():
    scoped = Settings(max_pivots=7)
    with settings_scope(scoped):
        assert get_settings().max_pivots == 7
    assert get_settings().max_pivots == 10000


def test_ordered_map_keeps_order_and_scope():
    def scaled(k):
        return k * get_settings().max_pivots

    with settings_scope(Settings(max_pivots=3)):
        assert ordered_map(scaled, range(10), workers=4) == [3 * k for k in range(10)]
    assert ordered_map(scaled, [2], workers=4) == [20000]
