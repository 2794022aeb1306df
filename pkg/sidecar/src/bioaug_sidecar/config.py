"""Service configuration.

Model identifiers select one adapter per backend seam. "builtin:" ids
map to deterministic CPU implementations that need no downloads; "hf:"
ids lazily wrap a transformers checkpoint. Sampling defaults are pinned
low (0.1) so completions stay near-greedy and reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping

ENV_PREFIX = "BIOAUG_SIDECAR_"


@dataclass
class SidecarConfig:
    scorer_model: str = "builtin:hash"
    relativity_model: str = "builtin:overlap"
    infill_model: str = "builtin:template"
    chat_model: str = "builtin:canned"
    device: str = "cpu"
    port: int = 8008
    temperature: float = 0.1
    top_p: float = 0.1

    def validate(self) -> None:
        if not 0 < self.temperature <= 1:
            raise ValueError(f"temperature must be in (0, 1], got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if not 0 < self.port < 65536:
            raise ValueError(f"port must be bindable (1..65535), got {self.port}")
        for label, model in self.models().items():
            if not (model.startswith("builtin:") or model.startswith("hf:")):
                raise ValueError(
                    f"{label} model {model!r} must start with 'builtin:' or 'hf:'")

    def models(self) -> dict[str, str]:
        return {
            "scorer": self.scorer_model,
            "relativity": self.relativity_model,
            "infill": self.infill_model,
            "chat": self.chat_model,
        }

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "SidecarConfig":
        env = os.environ if env is None else env
        cfg = cls()
        text_fields = {
            "SCORER": "scorer_model",
            "RELATIVITY": "relativity_model",
            "INFILL": "infill_model",
            "CHAT": "chat_model",
            "DEVICE": "device",
        }
        for suffix, attr in text_fields.items():
            value = env.get(ENV_PREFIX + suffix)
            if value:
                setattr(cfg, attr, value)
        if env.get(ENV_PREFIX + "PORT"):
            cfg.port = int(env[ENV_PREFIX + "PORT"])
        if env.get(ENV_PREFIX + "TEMPERATURE"):
            cfg.temperature = float(env[ENV_PREFIX + "TEMPERATURE"])
        if env.get(ENV_PREFIX + "TOP_P"):
            cfg.top_p = float(env[ENV_PREFIX + "TOP_P"])
        cfg.validate()
        return cfg
