"""Service configuration from environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

ALL_TASKS = ("align", "specificity", "sentiment", "embed", "absa", "entail")


@dataclass
class Settings:
    max_batch: int = 64
    enabled_tasks: tuple[str, ...] = field(default_factory=lambda: ALL_TASKS)
    # tasks configured to serve but whose checkpoint failed to load; the
    # service reports them via 503 instead of silently dropping them
    unavailable_tasks: tuple[str, ...] = ()
    embed_dim: int = 384

    @classmethod
    def from_env(cls) -> "Settings":
        def csv(name: str) -> tuple[str, ...] | None:
            raw = os.environ.get(name)
            if raw is None:
                return None
            return tuple(t.strip() for t in raw.split(",") if t.strip())

        return cls(
            max_batch=int(os.environ.get("SCORER_MAX_BATCH", "64")),
            enabled_tasks=csv("SCORER_TASKS") or ALL_TASKS,
            unavailable_tasks=csv("SCORER_UNAVAILABLE") or (),
            embed_dim=int(os.environ.get("SCORER_EMBED_DIM", "384")),
        )
