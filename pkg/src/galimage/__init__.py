"""Certify large image of mod-ell Galois representations attached to newforms."""

__version__ = "0.1.0"

from .certificate import Options, certify, level_skippable, verify  # noqa: E402
from .store import DataSource, fetch_newform  # noqa: E402

__all__ = ["DataSource", "Options", "certify", "fetch_newform", "level_skippable", "verify", "__version__"]
