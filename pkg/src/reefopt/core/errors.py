from __future__ import annotations


class ConfigError(ValueError):
    """A run configuration, scenario file or solution file is invalid.

    The message always names where the problem is (key path, row number or
    JSON line/column) so the CLI can print it as-is.
    """
