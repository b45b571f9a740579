"""Service configuration, loadable from a JSON file.

Remote-model credentials are environment variables, never config-file
fields, so config files can be committed safely.
"""

from __future__ import annotations

import json
import secrets
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InputFormatError

DEFAULT_CLASSIFIERS = {
    "content": "content-baseline",
    "evidence": "evidence-baseline",
    "success": "success-baseline",
}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    store_path: str = "revisecoach.db"
    lexicon_dir: str | None = None
    embeddings_path: str | None = None
    token_secret: str = field(default_factory=lambda: secrets.token_hex(32))
    token_ttl_hours: float = 8.0
    classifiers: dict = field(default_factory=lambda: dict(DEFAULT_CLASSIFIERS))
    admin_user: str = "admin"
    admin_password: str = "admin"
    synchronous: bool = True
    worker_threads: int = 2

    def __post_init__(self):
        # Partial classifier overrides keep the baseline for other stages.
        self.classifiers = {**DEFAULT_CLASSIFIERS, **self.classifiers}

    @classmethod
    def load(cls, path: str | Path) -> "ServiceConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputFormatError(
                f"invalid JSON: {exc.msg}", path=str(path), line=exc.lineno
            ) from exc
        known = {f for f in cls.__dataclass_fields__}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise InputFormatError(f"unknown config keys: {sorted(unknown)}", path=str(path))
        return cls(**data)
