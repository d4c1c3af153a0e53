"""
Tests for settings configuration.
"""
import pytest
from pydantic import ValidationError

from config.settings import Settings, get_settings


def test_defaults():
    """Test the default values."""
    settings = Settings()
    assert settings.debug is False
    assert settings.log_level == "INFO"
    assert settings.float_format == "%.17g"
    assert settings.max_workers == 4
    assert settings.suites == ["all"]


def test_suites_from_env_json(monkeypatch):
    """Test that suites can be set from environment variable using JSON."""
    monkeypatch.setenv("CURVOSC_SUITES", '["ktrig", "flat_limits"]')
    settings = Settings()
    assert settings.suites == ["ktrig", "flat_limits"]


def test_suites_from_env_csv(monkeypatch):
    """Test that suites can be set from environment variable using CSV."""
    monkeypatch.setenv("CURVOSC_SUITES", "ktrig, flat_limits,")
    settings = Settings()
    assert settings.suites == ["ktrig", "flat_limits"]


def test_debug_from_env(monkeypatch):
    """Test that debug can be set from environment variable."""
    monkeypatch.setenv("CURVOSC_DEBUG", "true")
    settings = Settings()
    assert settings.debug is True
    assert settings.effective_log_level == "DEBUG"

    monkeypatch.setenv("CURVOSC_DEBUG", "false")
    settings = Settings()
    assert settings.debug is False
    assert settings.effective_log_level == "INFO"


def test_log_level_normalized(monkeypatch):
    """Test that log levels are upper-cased and validated."""
    monkeypatch.setenv("CURVOSC_LOG_LEVEL", "warning")
    assert Settings().log_level == "WARNING"
    monkeypatch.setenv("CURVOSC_LOG_LEVEL", "chatty")
    with pytest.raises(ValidationError):
        Settings()


def test_max_workers_validated(monkeypatch):
    """Test that the worker count must be positive."""
    monkeypatch.setenv("CURVOSC_MAX_WORKERS", "0")
    with pytest.raises(ValidationError):
        Settings()


def test_output_dir_creation(tmp_path, monkeypatch):
    """Test that the output directory is created."""
    target = tmp_path / "artifacts" / "runs"
    monkeypatch.setenv("CURVOSC_OUTPUT_DIR", str(target))
    settings = Settings()
    assert settings.output_dir == target
    assert settings.output_dir.exists()
    assert settings.output_dir.is_dir()


def test_get_settings_is_cached():
    """Test that get_settings returns one shared instance."""
    get_settings.cache_clear()
    try:
        assert get_settings() is get_settings()
    finally:
        get_settings.cache_clear()
