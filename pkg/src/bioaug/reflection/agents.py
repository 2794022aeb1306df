"""Chat-agent seam for the debate stage."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

# Pinned sampling settings for remote agents; scripted test agents are
# deterministic by construction and ignore them.
AGENT_TEMPERATURE = 0.1
AGENT_TOP_P = 0.1


@runtime_checkable
class AgentBackend(Protocol):
    """One debate participant. Deterministic under a fixed seed."""

    id: str
    concurrency_safe: bool

    def chat(self, prompt: str, seed: int) -> str:
        ...
