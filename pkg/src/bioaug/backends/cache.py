"""Persistent response cache for backend calls.

Responses are keyed by a fingerprint of (backend id, full request); the
request always includes the seed when the call is seeded, so a changed
seed is a miss. Storage is a single sqlite file safe for concurrent use
within one process. A corrupt file is moved aside and the cache cold
starts with a warning instead of failing the run.
"""

from __future__ import annotations

import hashlib
import json
import logging
import sqlite3
import threading
import time
from pathlib import Path
from typing import Sequence

from bioaug.attribution.template import MaskedTemplate
from bioaug.backends.wire import template_to_wire

log = logging.getLogger(__name__)


def fingerprint(backend_id: str, request: dict) -> str:
    payload = json.dumps({"backend": backend_id, "request": request},
                         ensure_ascii=False, sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self.cold_started = False
        self._conn = self._open()

    def _open(self) -> sqlite3.Connection:
        try:
            conn = sqlite3.connect(self.path, check_same_thread=False)
            conn.execute("CREATE TABLE IF NOT EXISTS responses ("
                         "fingerprint TEXT PRIMARY KEY, "
                         "response TEXT NOT NULL, "
                         "created REAL NOT NULL)")
            conn.commit()
            return conn
        except sqlite3.DatabaseError:
            quarantined = self.path.with_suffix(self.path.suffix + ".corrupt")
            log.warning("response cache at %s is corrupt; moving to %s and "
                        "starting cold", self.path, quarantined)
            self.path.replace(quarantined)
            self.cold_started = True
            conn = sqlite3.connect(self.path, check_same_thread=False)
            conn.execute("CREATE TABLE IF NOT EXISTS responses ("
                         "fingerprint TEXT PRIMARY KEY, "
                         "response TEXT NOT NULL, "
                         "created REAL NOT NULL)")
            conn.commit()
            return conn

    def get(self, key: str) -> str | None:
        with self._lock:
            try:
                row = self._conn.execute(
                    "SELECT response FROM responses WHERE fingerprint = ?",
                    (key,)).fetchone()
            except sqlite3.DatabaseError:
                log.warning("response cache read failed; treating as miss")
                row = None
            if row is None:
                self.misses += 1
                return None
            self.hits += 1
            return row[0]

    def put(self, key: str, response: str) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO responses VALUES (?, ?, ?)",
                (key, response, time.time()))
            self._conn.commit()

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses,
                "hit_rate": self.hit_rate, "cold_started": self.cold_started}

    def close(self) -> None:
        self._conn.close()


class CachedScorer:
    """Scorer wrapper that consults the cache before the backend."""

    def __init__(self, inner, cache: ResponseCache, backend_id: str):
        self.inner = inner
        self.cache = cache
        self.backend_id = backend_id
        self.kind = inner.kind
        self.concurrency_safe = getattr(inner, "concurrency_safe", True)

    def score(self, tokens: Sequence[str], restriction: str | None = None) -> float:
        request = {"sequence": list(tokens), "kind": self.kind}
        if restriction is not None:
            request["restriction_text"] = restriction
        key = fingerprint(self.backend_id, request)
        hit = self.cache.get(key)
        if hit is not None:
            return float(json.loads(hit))
        value = float(self.inner.score(tokens, restriction))
        self.cache.put(key, json.dumps(value))
        return value


class CachedGenerator:
    def __init__(self, inner, cache: ResponseCache, backend_id: str):
        self.inner = inner
        self.cache = cache
        self.backend_id = backend_id
        self.concurrency_safe = getattr(inner, "concurrency_safe", True)

    def infill(self, template: MaskedTemplate, restriction_text: str,
               key_structure: str, seed: int) -> list[str]:
        request = template_to_wire(template)
        request.update({"restriction_text": restriction_text,
                        "key_structure": key_structure, "seed": seed})
        key = fingerprint(self.backend_id, request)
        hit = self.cache.get(key)
        if hit is not None:
            return list(json.loads(hit))
        tokens = list(self.inner.infill(template, restriction_text,
                                        key_structure, seed))
        self.cache.put(key, json.dumps(tokens, ensure_ascii=False))
        return tokens


class CachedExtractor:
    def __init__(self, inner, cache: ResponseCache, backend_id: str):
        self.inner = inner
        self.cache = cache
        self.backend_id = backend_id
        self.concurrency_safe = getattr(inner, "concurrency_safe", True)

    def propose(self, sentences: Sequence[str],
                failing_pairs: Sequence[tuple[str, float]] | None = None) -> str:
        request = {"concatenated_sentences": list(sentences)}
        if failing_pairs:
            request["failing_pairs"] = [[s, v] for s, v in failing_pairs]
        key = fingerprint(self.backend_id, request)
        hit = self.cache.get(key)
        if hit is not None:
            return json.loads(hit)
        text = self.inner.propose(sentences, failing_pairs)
        self.cache.put(key, json.dumps(text, ensure_ascii=False))
        return text


class CachedAgent:
    def __init__(self, inner, cache: ResponseCache, backend_id: str | None = None):
        self.inner = inner
        self.cache = cache
        self.backend_id = backend_id or f"agent:{inner.id}"
        self.id = inner.id
        self.concurrency_safe = getattr(inner, "concurrency_safe", True)

    def chat(self, prompt: str, seed: int) -> str:
        key = fingerprint(self.backend_id, {"prompt": prompt, "seed": seed})
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        text = self.inner.chat(prompt, seed)
        self.cache.put(key, text)
        return text
