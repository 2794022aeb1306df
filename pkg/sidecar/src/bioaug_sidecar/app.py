"""HTTP service exposing the three backend seams.

Routes validate against the wire schemas shipped with the core package
(one source of truth, no duplicated contract), log every request with
the effective sampling settings, and map adapter failures onto the
status codes the core HTTP clients understand: 400 malformed request,
422 self-detected contract violation, 429 busy, 503 model unavailable.
"""

from __future__ import annotations

import json
import logging
import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from jsonschema import Draft202012Validator

from bioaug.errors import ContractViolationError
from bioaug.backends.wire import (
    CHAT_REQUEST_SCHEMA,
    INFILL_REQUEST_SCHEMA,
    SCORE_REQUEST_SCHEMA,
    parse_wire_template,
)
from bioaug_sidecar.adapters import AdapterBusy, AdapterUnavailable, build_adapters
from bioaug_sidecar.config import SidecarConfig

LOGGER = logging.getLogger("bioaug_sidecar")

_SCORE_VALIDATOR = Draft202012Validator(SCORE_REQUEST_SCHEMA)
_INFILL_VALIDATOR = Draft202012Validator(INFILL_REQUEST_SCHEMA)
_CHAT_VALIDATOR = Draft202012Validator(CHAT_REQUEST_SCHEMA)


def _error(status: int, message: str, retry_after: float | None = None) -> JSONResponse:
    headers = {}
    if retry_after is not None:
        headers["Retry-After"] = f"{retry_after:g}"
    return JSONResponse({"error": message}, status_code=status, headers=headers)


async def _read_payload(request: Request, validator: Draft202012Validator):
    """Parsed body or an error response; never raises."""
    try:
        payload = json.loads(await request.body())
    except (ValueError, UnicodeDecodeError):
        return None, _error(400, "malformed JSON body")
    errors = sorted(validator.iter_errors(payload), key=lambda e: e.json_path)
    if errors:
        return None, _error(400, f"invalid request: {errors[0].message}")
    return payload, None


def create_app(config: SidecarConfig | None = None) -> FastAPI:
    if config is None:
        config = SidecarConfig.from_env()
    config.validate()
    app = FastAPI(title="bioaug inference sidecar", version="0.1.0")
    app.state.config = config
    app.state.adapters = build_adapters(config)

    def adapter(name: str):
        return app.state.adapters[name]

    @app.get("/health")
    async def health() -> dict:
        return {
            "status": "ok",
            "models": {name: ad.describe()
                       for name, ad in app.state.adapters.items()},
        }

    @app.post("/v1/score")
    async def score(request: Request):
        payload, failure = await _read_payload(request, _SCORE_VALIDATOR)
        if failure is not None:
            return failure
        kind = payload["kind"]
        ad = adapter("relativity" if kind == "inference-relativity" else "scorer")
        LOGGER.info("score kind=%s model=%s tokens=%d", kind, ad.model_id,
                    len(payload["sequence"]))
        try:
            with ad.lock:
                value = ad.score(payload["sequence"],
                                 payload.get("restriction_text"))
        except AdapterUnavailable as exc:
            return _error(503, str(exc), retry_after=exc.retry_after)
        except AdapterBusy as exc:
            return _error(429, str(exc), retry_after=exc.retry_after)
        if not math.isfinite(value):
            return _error(503, "scorer produced a non-finite value",
                          retry_after=30.0)
        return {"score": value}

    @app.post("/v1/infill")
    async def infill(request: Request):
        payload, failure = await _read_payload(request, _INFILL_VALIDATOR)
        if failure is not None:
            return failure
        sentinel = payload["mask_sentinel"]
        try:
            template = parse_wire_template(payload["template_tokens"], sentinel)
        except ContractViolationError as exc:
            return _error(422, f"contract violation: {exc}")
        ad = adapter("infill")
        masks = sum(1 for t in template.masked_tokens if t == sentinel)
        LOGGER.info("infill model=%s seed=%d masks=%d entities=%d",
                    ad.model_id, payload["seed"], masks, len(template.entities))
        try:
            with ad.lock:
                tokens = ad.infill(template.masked_tokens, sentinel,
                                   payload["restriction_text"],
                                   payload["key_structure"], payload["seed"])
        except AdapterUnavailable as exc:
            return _error(503, str(exc), retry_after=exc.retry_after)
        except AdapterBusy as exc:
            return _error(429, str(exc), retry_after=exc.retry_after)
        violation = _infill_violation(tokens, sentinel, template.entities)
        if violation:
            return _error(422, f"contract violation: {violation}")
        return {"tokens": list(tokens)}

    @app.post("/v1/chat")
    async def chat(request: Request):
        payload, failure = await _read_payload(request, _CHAT_VALIDATOR)
        if failure is not None:
            return failure
        ad = adapter("chat")
        LOGGER.info("chat model=%s temperature=%s top_p=%s seed=%d",
                    ad.model_id, payload["temperature"], payload["top_p"],
                    payload["seed"])
        try:
            with ad.lock:
                text = ad.chat(payload["system"], payload["user"],
                               payload["temperature"], payload["top_p"],
                               payload["seed"])
        except AdapterUnavailable as exc:
            return _error(503, str(exc), retry_after=exc.retry_after)
        except AdapterBusy as exc:
            return _error(429, str(exc), retry_after=exc.retry_after)
        return {
            "text": text,
            "deterministic": bool(getattr(ad, "deterministic", False)),
            "model": ad.model_id,
        }

    return app


def _infill_violation(tokens, sentinel: str, entities) -> str | None:
    """Self-check the generation contract before answering."""
    if sentinel in tokens:
        return f"output still contains the sentinel {sentinel!r}"
    for _, surface in entities:
        want = surface.split(" ")
        width = len(want)
        if not any(list(tokens[i:i + width]) == want
                   for i in range(len(tokens) - width + 1)):
            return f"entity surface {surface!r} lost from output"
    return None
