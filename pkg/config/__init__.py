"""Configuration: environment settings and YAML run configs."""

from config.settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]
