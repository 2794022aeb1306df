"""Model adapters behind the three service routes.

Each adapter owns one model identifier, a lifecycle state for /health,
and a lock that serializes inference so concurrent requests cannot
interleave a seeded sampling sequence. Builtin adapters are pure CPU
functions; "hf:" adapters wrap a transformers pipeline that loads
lazily on first use and reports 503 (via AdapterUnavailable) when the
checkpoint cannot be loaded.
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
from typing import Sequence

from bioaug_sidecar.config import SidecarConfig

UNLOADED = "unloaded"
READY = "ready"
FAILED = "failed"


class AdapterUnavailable(Exception):
    """The model behind a route cannot serve; maps to HTTP 503."""

    def __init__(self, message: str, retry_after: float = 30.0):
        super().__init__(message)
        self.retry_after = retry_after


class AdapterBusy(Exception):
    """Transient overload; maps to HTTP 429."""

    def __init__(self, message: str, retry_after: float = 1.0):
        super().__init__(message)
        self.retry_after = retry_after


class BaseAdapter:
    def __init__(self, model_id: str):
        self.model_id = model_id
        self.state = READY if model_id.startswith("builtin:") else UNLOADED
        self.lock = threading.Lock()

    def describe(self) -> dict:
        return {"id": self.model_id, "state": self.state}


def _stable_unit(payload: object) -> float:
    """Deterministic pseudo-score in [0, 1) from any JSON-able payload."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(blob.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2 ** 64


# ---------------------------------------------------------------------------
# Scoring


class BuiltinHashScorer(BaseAdapter):
    """Task-logit stand-in: a stable pseudo log-score of the sequence."""

    def score(self, sequence: Sequence[str], restriction_text: str | None) -> float:
        return _stable_unit([list(sequence)])


class BuiltinOverlapScorer(BaseAdapter):
    """Relativity stand-in: lexical support of the restriction text.

    The fraction of restriction tokens present in the sequence is a
    crude but monotone entailment proxy, which is all the contract
    requires of a deterministic default.
    """

    def score(self, sequence: Sequence[str], restriction_text: str | None) -> float:
        wanted = set((restriction_text or "").split())
        if not wanted:
            return 0.0
        return len(wanted & set(sequence)) / len(wanted)


class HfScorer(BaseAdapter):
    """Text-classification checkpoint; top-label probability as the score."""

    def __init__(self, model_id: str, device: str, relativity: bool):
        super().__init__(model_id)
        self.device = device
        self.relativity = relativity
        self._pipeline = None

    def _load(self):
        if self.state == FAILED:
            raise AdapterUnavailable(f"model {self.model_id} failed to load")
        if self._pipeline is None:
            try:
                from transformers import pipeline

                self._pipeline = pipeline(
                    "text-classification",
                    model=self.model_id.removeprefix("hf:"),
                    device=-1 if self.device == "cpu" else self.device,
                    top_k=None)
                self.state = READY
            except Exception as exc:
                self.state = FAILED
                raise AdapterUnavailable(
                    f"model {self.model_id} failed to load: {exc}") from exc
        return self._pipeline

    def score(self, sequence: Sequence[str], restriction_text: str | None) -> float:
        pipe = self._load()
        text = " ".join(sequence)
        if self.relativity and restriction_text:
            result = pipe({"text": text, "text_pair": restriction_text})
        else:
            result = pipe(text)
        while isinstance(result, list):
            result = result[0]
        return float(result["score"])


# ---------------------------------------------------------------------------
# Infilling

FILLERS = (
    "notably", "thereby", "reportedly", "markedly", "subsequently",
    "clinically", "consistently", "additionally",
)


class BuiltinTemplateInfiller(BaseAdapter):
    """Fill each mask with a seeded neutral adverb; keep everything else."""

    def infill(self, masked_tokens: Sequence[str], sentinel: str,
               restriction_text: str, key_structure: str, seed: int) -> list[str]:
        rng = random.Random(seed)
        return [FILLERS[rng.randrange(len(FILLERS))] if tok == sentinel else tok
                for tok in masked_tokens]


class HfInfiller(BaseAdapter):
    """Fill-mask checkpoint applied one sentinel at a time, left to right."""

    def __init__(self, model_id: str, device: str):
        super().__init__(model_id)
        self.device = device
        self._pipeline = None

    def _load(self):
        if self.state == FAILED:
            raise AdapterUnavailable(f"model {self.model_id} failed to load")
        if self._pipeline is None:
            try:
                from transformers import pipeline

                self._pipeline = pipeline(
                    "fill-mask", model=self.model_id.removeprefix("hf:"),
                    device=-1 if self.device == "cpu" else self.device)
                self.state = READY
            except Exception as exc:
                self.state = FAILED
                raise AdapterUnavailable(
                    f"model {self.model_id} failed to load: {exc}") from exc
        return self._pipeline

    def infill(self, masked_tokens: Sequence[str], sentinel: str,
               restriction_text: str, key_structure: str, seed: int) -> list[str]:
        pipe = self._load()
        tokens = list(masked_tokens)
        context = f"{key_structure} {restriction_text}".strip()
        for position, token in enumerate(tokens):
            if token != sentinel:
                continue
            window = list(tokens)
            window[position] = pipe.tokenizer.mask_token
            prompt = " ".join(window)
            if context:
                prompt = f"{context} | {prompt}"
            best = pipe(prompt, top_k=1)
            while isinstance(best, list):
                best = best[0]
            tokens[position] = str(best["token_str"]).strip() or "..."
        return tokens


# ---------------------------------------------------------------------------
# Chat

_ANSWER_OPEN = "<<<ANSWER"
_ANSWER_CLOSE = ">>>"
_CURRENT_LINE = "Current augmented sentence: "
_ASPECTS = ("word_definition", "word_similarity", "syntax_correctness",
            "usage_example")


def _fenced(*lines: str) -> str:
    return "\n".join([_ANSWER_OPEN, *lines, _ANSWER_CLOSE])


class BuiltinCannedChat(BaseAdapter):
    """Deterministic phase-aware completions.

    The expected reply shape is recognized from the answer-format block
    embedded in the prompt, the same cue a live model gets. Revisions
    echo the current candidate, reviews report no discrepancies, and
    grades are a fixed high score, so a full debate terminates quickly
    and reproducibly.
    """

    deterministic = True

    def chat(self, system: str, user: str, temperature: float, top_p: float,
             seed: int) -> str:
        prompt = f"{system}\n\n{user}"
        if "REVISED:" in prompt:
            current = ""
            for line in prompt.splitlines():
                if line.startswith(_CURRENT_LINE):
                    current = line[len(_CURRENT_LINE):]
            return _fenced(f"REVISED: {current}")
        if "ASPECT:" in prompt:
            return _fenced(*(f"ASPECT: {name} ||| reasonable ||| consistent usage"
                             for name in _ASPECTS))
        if "GRADE:" in prompt:
            return _fenced("GRADE: 85/100")
        if "REVIEW:" in prompt:
            return _fenced("REVIEW: NONE")
        return _fenced("acknowledged")


class HfChat(BaseAdapter):
    """Causal-LM checkpoint with seeded near-greedy sampling."""

    deterministic = True  # transformers.set_seed pins CPU sampling

    def __init__(self, model_id: str, device: str):
        super().__init__(model_id)
        self.device = device
        self._pipeline = None

    def _load(self):
        if self.state == FAILED:
            raise AdapterUnavailable(f"model {self.model_id} failed to load")
        if self._pipeline is None:
            try:
                from transformers import pipeline

                self._pipeline = pipeline(
                    "text-generation",
                    model=self.model_id.removeprefix("hf:"),
                    device=-1 if self.device == "cpu" else self.device)
                self.state = READY
            except Exception as exc:
                self.state = FAILED
                raise AdapterUnavailable(
                    f"model {self.model_id} failed to load: {exc}") from exc
        return self._pipeline

    def chat(self, system: str, user: str, temperature: float, top_p: float,
             seed: int) -> str:
        pipe = self._load()
        from transformers import set_seed

        set_seed(seed % 2 ** 32)
        prompt = f"{system}\n\n{user}" if system else user
        out = pipe(prompt, do_sample=True, temperature=temperature,
                   top_p=top_p, max_new_tokens=128, return_full_text=False)
        return str(out[0]["generated_text"])


# ---------------------------------------------------------------------------


def _pick(model_id: str, builtin, hf):
    if model_id.startswith("builtin:"):
        return builtin()
    return hf()


def build_adapters(config: SidecarConfig) -> dict[str, BaseAdapter]:
    """One adapter per seam, per the configured model identifiers."""
    return {
        "scorer": _pick(config.scorer_model,
                        lambda: BuiltinHashScorer(config.scorer_model),
                        lambda: HfScorer(config.scorer_model, config.device,
                                         relativity=False)),
        "relativity": _pick(config.relativity_model,
                            lambda: BuiltinOverlapScorer(config.relativity_model),
                            lambda: HfScorer(config.relativity_model,
                                             config.device, relativity=True)),
        "infill": _pick(config.infill_model,
                        lambda: BuiltinTemplateInfiller(config.infill_model),
                        lambda: HfInfiller(config.infill_model, config.device)),
        "chat": _pick(config.chat_model,
                      lambda: BuiltinCannedChat(config.chat_model),
                      lambda: HfChat(config.chat_model, config.device)),
    }
