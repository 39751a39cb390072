"""FastAPI service wrapping the harness core."""

from .app import create_app

__all__ = ["create_app"]
