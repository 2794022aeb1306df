"""HTTP clients for the three backend seams plus the extractor.

All clients speak the wire contracts in bioaug.backends.wire, retry on
429 and 5xx honoring a Retry-After header when present, and surface
anything else as a backend error. An API key, when configured via the
BIOAUG_API_KEY environment variable, rides along as a bearer token.
"""

from __future__ import annotations

import os
import time
from typing import Sequence

import requests

from bioaug.errors import BackendError
from bioaug.attribution.scorers import sequence_fingerprint
from bioaug.attribution.template import MaskedTemplate
from bioaug.backends.wire import template_to_wire
from bioaug.reflection.agents import AGENT_TEMPERATURE, AGENT_TOP_P

DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRIES = 3
_BACKOFF_BASE = 0.2


class _HttpClient:
    def __init__(self, url: str, *, timeout: float = DEFAULT_TIMEOUT,
                 max_retries: int = DEFAULT_RETRIES,
                 session: requests.Session | None = None):
        self.url = url
        self.timeout = timeout
        self.max_retries = max_retries
        self.session = session or requests.Session()
        self.concurrency_safe = True

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get("BIOAUG_API_KEY")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return headers

    def _post(self, payload: dict, fingerprint: str | None = None) -> dict:
        last_error: str = "no attempt made"
        for attempt in range(self.max_retries + 1):
            try:
                resp = self.session.post(self.url, json=payload,
                                         headers=self._headers(),
                                         timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = str(exc)
                if attempt < self.max_retries:
                    time.sleep(_BACKOFF_BASE * 2 ** attempt)
                continue
            if resp.status_code == 200:
                try:
                    return resp.json()
                except ValueError:
                    raise BackendError(
                        f"{self.url} returned non-JSON body",
                        retriable=False, fingerprint=fingerprint)
            if resp.status_code in (429, 500, 502, 503, 504):
                last_error = f"HTTP {resp.status_code}"
                if attempt < self.max_retries:
                    retry_after = resp.headers.get("Retry-After")
                    try:
                        delay = float(retry_after) if retry_after else \
                            _BACKOFF_BASE * 2 ** attempt
                    except ValueError:
                        delay = _BACKOFF_BASE * 2 ** attempt
                    time.sleep(delay)
                continue
            raise BackendError(f"{self.url} rejected request: "
                               f"HTTP {resp.status_code}",
                               retriable=False, fingerprint=fingerprint)
        raise BackendError(f"{self.url} unreachable after "
                           f"{self.max_retries + 1} attempts: {last_error}",
                           retriable=True, fingerprint=fingerprint)


class HttpScorer(_HttpClient):
    def __init__(self, url: str, kind: str, **kwargs):
        super().__init__(url, **kwargs)
        self.kind = kind

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        payload = {"sequence": list(tokens), "kind": self.kind}
        if restriction is not None:
            payload["restriction_text"] = restriction
        fp = sequence_fingerprint(tokens, restriction)
        body = self._post(payload, fingerprint=fp)
        if "score" not in body or not isinstance(body["score"], (int, float)):
            raise BackendError(f"{self.url} response missing numeric score",
                               retriable=False, fingerprint=fp)
        return float(body["score"])


class HttpGenerator(_HttpClient):
    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        payload = template_to_wire(template)
        payload.update({"restriction_text": restriction_text,
                        "key_structure": key_structure, "seed": seed})
        body = self._post(payload)
        tokens = body.get("tokens")
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise BackendError(f"{self.url} response missing token list",
                               retriable=False)
        return tokens


class HttpExtractor(_HttpClient):
    def propose(self, sentences: Sequence[str],
                failing_pairs: Sequence[tuple[str, float]] | None = None) -> str:
        payload: dict = {"concatenated_sentences": list(sentences)}
        if failing_pairs:
            payload["failing_pairs"] = [[s, v] for s, v in failing_pairs]
        body = self._post(payload)
        text = body.get("structure_text")
        if not isinstance(text, str):
            raise BackendError(f"{self.url} response missing structure_text",
                               retriable=False)
        return text


class HttpAgent(_HttpClient):
    """Chat agent client; sampling settings are pinned, never overridable."""

    def __init__(self, url: str, agent_id: str, **kwargs):
        super().__init__(url, **kwargs)
        self.id = agent_id

    def chat(self, prompt: str, seed: int) -> str:
        system, _, user = prompt.partition("\n\n")
        if not user:
            system, user = "", prompt
        payload = {
            "system": system,
            "user": user,
            "temperature": AGENT_TEMPERATURE,
            "top_p": AGENT_TOP_P,
            "seed": seed,
        }
        body = self._post(payload)
        text = body.get("text")
        if not isinstance(text, str):
            raise BackendError(f"{self.url} response missing text",
                               retriable=False)
        return text
