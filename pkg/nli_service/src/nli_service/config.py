"""Service configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass

# Any 3-way NLI sequence-classification checkpoint works; the label-to-index
# mapping is read from the checkpoint's own metadata, never assumed. The
# built-in "stub" scorer is a deterministic offline stand-in for development
# and protocol tests.
REFERENCE_CHECKPOINTS = (
    "cross-encoder/nli-deberta-v3-large",
    "microsoft/deberta-large-mnli",
)
DEFAULT_MODEL = "stub"


@dataclass(frozen=True)
class ServiceConfig:
    model_id: str = DEFAULT_MODEL
    host: str = "127.0.0.1"
    port: int = 8080
    max_batch_size: int = 64
    device: str = "cpu"

    def __post_init__(self):
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        return cls(
            model_id=os.environ.get("NLI_MODEL", DEFAULT_MODEL),
            host=os.environ.get("NLI_HOST", "127.0.0.1"),
            port=int(os.environ.get("NLI_PORT", "8080")),
            max_batch_size=int(os.environ.get("NLI_MAX_BATCH", "64")),
            device=os.environ.get("NLI_DEVICE", "cpu"),
        )
