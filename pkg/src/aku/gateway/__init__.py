"""HTTP/JSON service and command-line interface over the engine."""

from .http import AppState, create_app

__all__ = ["AppState", "create_app"]
