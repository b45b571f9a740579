"""REST service: persistence, identity/roles, and the submission workflow."""

from .app import create_app
from .config import ServiceConfig

__all__ = ["create_app", "ServiceConfig"]
