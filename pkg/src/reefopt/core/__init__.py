"""User defaults, XDG paths and the shared configuration error.

The JSON run-config schema lives in :mod:`reefopt.core.runconfig`.
"""

from __future__ import annotations

from . import xdg
from .config import get_output_dir, get_seeds, get_threads, load_config
from .errors import ConfigError

__all__ = ["xdg", "ConfigError", "get_output_dir", "get_seeds", "get_threads", "load_config"]
