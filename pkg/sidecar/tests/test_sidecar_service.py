"""Route contracts, determinism, failure codes, and live-socket use."""

from __future__ import annotations

import logging
import random
import threading
import time

import pytest
import uvicorn
from fastapi.testclient import TestClient
from jsonschema import Draft202012Validator

from bioaug.corpus.model import EntityMention
from bioaug.attribution.template import MASK_SENTINEL, build_masked_template
from bioaug.backends.http import HttpAgent, HttpGenerator, HttpScorer
from bioaug.backends.wire import (
    CHAT_RESPONSE_SCHEMA,
    HEALTH_RESPONSE_SCHEMA,
    INFILL_RESPONSE_SCHEMA,
    SCORE_RESPONSE_SCHEMA,
    template_to_wire,
)
from bioaug.reflection.debate import run_debate

from bioaug_sidecar import SidecarConfig, create_app
from bioaug_sidecar.adapters import AdapterBusy, AdapterUnavailable

SCORE_OK = Draft202012Validator(SCORE_RESPONSE_SCHEMA)
INFILL_OK = Draft202012Validator(INFILL_RESPONSE_SCHEMA)
CHAT_OK = Draft202012Validator(CHAT_RESPONSE_SCHEMA)
HEALTH_OK = Draft202012Validator(HEALTH_RESPONSE_SCHEMA)


def score_payload(**overrides):
    payload = {"sequence": ["aspirin", "inhibits", "cox2"],
               "kind": "task-logit"}
    payload.update(overrides)
    return payload


def chat_payload(**overrides):
    payload = {"system": "You debate.", "user": "GRADE: [Insert here]",
               "temperature": 0.1, "top_p": 0.1, "seed": 5}
    payload.update(overrides)
    return payload


def sample_template(keywords=(1,), spans=((0, 0), (3, 4))):
    tokens = ("aspirin", "strongly", "inhibits", "renal", "failure", "today")
    entities = tuple(
        EntityMention(span, etype, " ".join(tokens[span[0]:span[1] + 1]))
        for span, etype in zip(spans, ("CHEM", "DIS")))
    return build_masked_template(tokens, keywords, entities)


def infill_payload(template=None, seed=3, **overrides):
    payload = template_to_wire(template or sample_template())
    payload.update({"restriction_text": "one substance lowers another",
                    "key_structure": "CHEM inhibits DIS", "seed": seed})
    payload.update(overrides)
    return payload


class TestHealth:
    def test_reports_model_readiness(self, client):
        body = client.get("/health").json()
        HEALTH_OK.validate(body)
        assert body["status"] == "ok"
        assert set(body["models"]) == {"scorer", "relativity", "infill",
                                       "chat"}
        assert all(m["state"] == "ready" for m in body["models"].values())


class TestScoreRoute:
    def test_identical_requests_identical_scores(self, client):
        first = client.post("/v1/score", json=score_payload())
        second = client.post("/v1/score", json=score_payload())
        assert first.status_code == 200
        SCORE_OK.validate(first.json())
        assert first.json() == second.json()

    def test_relativity_tracks_restriction_overlap(self, client):
        full = client.post("/v1/score", json=score_payload(
            kind="inference-relativity",
            restriction_text="aspirin inhibits")).json()
        none = client.post("/v1/score", json=score_payload(
            kind="inference-relativity",
            restriction_text="unrelated words entirely")).json()
        assert full["score"] == 1.0
        assert none["score"] == 0.0

    def test_missing_sequence_names_the_field(self, client):
        response = client.post("/v1/score", json={"kind": "task-logit"})
        assert response.status_code == 400
        assert "sequence" in response.json()["error"]

    @pytest.mark.parametrize("payload", [
        score_payload(kind="probability"),
        score_payload(sequence=[]),
        score_payload(extra="nope"),
    ])
    def test_schema_violations_rejected(self, client, payload):
        assert client.post("/v1/score", json=payload).status_code == 400

    def test_malformed_json_body(self, client):
        response = client.post("/v1/score", content=b"{not json",
                               headers={"Content-Type": "application/json"})
        assert response.status_code == 400
        assert response.json()["error"] == "malformed JSON body"


class TestInfillRoute:
    def test_masks_filled_entities_preserved(self, client):
        template = sample_template(keywords=(1,))
        response = client.post("/v1/infill", json=infill_payload(template))
        assert response.status_code == 200
        body = response.json()
        INFILL_OK.validate(body)
        tokens = body["tokens"]
        assert MASK_SENTINEL not in tokens
        assert tokens[0] == "aspirin"
        assert tokens[1] == "strongly"          # kept keyword
        assert tokens[3:5] == ["renal", "failure"]
        assert len(tokens) == 6

    def test_zero_masks_echoes_unmasked_tokens(self, client):
        template = sample_template(keywords=(1, 2, 5))
        response = client.post("/v1/infill", json=infill_payload(template))
        assert response.json()["tokens"] == list(template.masked_tokens)

    def test_seeded_repeat_is_identical(self, client):
        template = sample_template(keywords=())
        one = client.post("/v1/infill", json=infill_payload(template, seed=9))
        two = client.post("/v1/infill", json=infill_payload(template, seed=9))
        other = client.post("/v1/infill", json=infill_payload(template,
                                                              seed=10))
        assert one.json() == two.json()
        assert one.json() != other.json()

    def test_malformed_template_is_a_contract_violation(self, client):
        payload = infill_payload()
        payload["template_tokens"] = ["[M]", "able", "|", "<s:CHEM>",
                                      "aspirin"]
        response = client.post("/v1/infill", json=payload)
        assert response.status_code == 422
        assert "contract violation" in response.json()["error"]

    def test_missing_field_rejected(self, client):
        payload = infill_payload()
        del payload["key_structure"]
        assert client.post("/v1/infill", json=payload).status_code == 400

    def test_self_detected_entity_loss_is_422(self, client, app):
        class DroppingInfiller:
            model_id = "builtin:broken"
            lock = threading.Lock()

            def infill(self, masked_tokens, sentinel, restriction_text,
                       key_structure, seed):
                return ["something", "else"]

        app.state.adapters["infill"] = DroppingInfiller()
        response = client.post("/v1/infill", json=infill_payload())
        assert response.status_code == 422
        assert "lost from output" in response.json()["error"]


class TestChatRoute:
    def test_phase_aware_deterministic_completions(self, client):
        graded = client.post("/v1/chat", json=chat_payload())
        assert graded.status_code == 200
        body = graded.json()
        CHAT_OK.validate(body)
        assert "GRADE: 85/100" in body["text"]
        assert body["deterministic"] is True
        assert body["model"] == "builtin:canned"

        again = client.post("/v1/chat", json=chat_payload())
        assert again.json() == body

        review = client.post("/v1/chat", json=chat_payload(
            user="List problems.\nREVIEW: [Insert here]")).json()
        assert "REVIEW: NONE" in review["text"]

        revise = client.post("/v1/chat", json=chat_payload(
            user=("Current augmented sentence: the dose was high\n"
                  "REVISED: [Insert here]"))).json()
        assert "REVISED: the dose was high" in revise["text"]

    def test_sampling_settings_appear_in_request_logs(self, client, caplog):
        with caplog.at_level(logging.INFO, logger="bioaug_sidecar"):
            client.post("/v1/chat", json=chat_payload())
        logged = "\n".join(r.getMessage() for r in caplog.records)
        assert "temperature=0.1" in logged
        assert "top_p=0.1" in logged

    def test_malformed_json_body(self, client):
        response = client.post("/v1/chat", content=b'{"system": ',
                               headers={"Content-Type": "application/json"})
        assert response.status_code == 400


class TestFailurePassthrough:
    def test_busy_adapter_maps_to_429_with_hint(self, client, app):
        class Busy:
            model_id = "builtin:busy"
            lock = threading.Lock()

            def chat(self, *args):
                raise AdapterBusy("rate limited", retry_after=0.5)

        app.state.adapters["chat"] = Busy()
        response = client.post("/v1/chat", json=chat_payload())
        assert response.status_code == 429
        assert response.headers["Retry-After"] == "0.5"

    def test_unavailable_adapter_maps_to_503_with_hint(self, client, app):
        class Down:
            model_id = "hf:gone"
            lock = threading.Lock()

            def score(self, sequence, restriction_text):
                raise AdapterUnavailable("model hf:gone failed to load",
                                         retry_after=30.0)

        app.state.adapters["scorer"] = Down()
        response = client.post("/v1/score", json=score_payload())
        assert response.status_code == 503
        assert response.headers["Retry-After"] == "30"
        assert "failed to load" in response.json()["error"]

    def test_non_finite_score_is_a_serving_failure(self, client, app):
        class NanScorer:
            model_id = "builtin:nan"
            lock = threading.Lock()

            def score(self, sequence, restriction_text):
                return float("nan")

        app.state.adapters["scorer"] = NanScorer()
        assert client.post("/v1/score",
                           json=score_payload()).status_code == 503


class TestCheckpointGatedAdapters:
    def test_load_failure_becomes_503_and_health_shows_failed(self):
        config = SidecarConfig(scorer_model="hf:no-such-checkpoint-000")
        client_gated = TestClient(create_app(config))
        before = client_gated.get("/health").json()
        assert before["models"]["scorer"]["state"] == "unloaded"
        response = client_gated.post("/v1/score", json=score_payload())
        assert response.status_code == 503
        assert "failed to load" in response.json()["error"]
        after = client_gated.get("/health").json()
        assert after["models"]["scorer"]["state"] == "failed"


class TestConfig:
    def test_defaults_pin_sampling_to_point_one(self):
        config = SidecarConfig()
        assert config.temperature == 0.1
        assert config.top_p == 0.1

    @pytest.mark.parametrize("kwargs", [
        dict(temperature=0.0),
        dict(top_p=1.5),
        dict(port=0),
        dict(chat_model="local:thing"),
    ])
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SidecarConfig(**kwargs).validate()

    def test_from_env_overrides(self):
        env = {"BIOAUG_SIDECAR_SCORER": "hf:some-checkpoint",
               "BIOAUG_SIDECAR_PORT": "9001"}
        config = SidecarConfig.from_env(env)
        assert config.scorer_model == "hf:some-checkpoint"
        assert config.port == 9001
        assert config.chat_model == "builtin:canned"


def random_golden_template(rng):
    words = ("plasma", "glucose", "insulin", "binding", "chronic", "renal",
             "aspirin", "dose")
    length = rng.randrange(4, 9)
    tokens = tuple(rng.choice(words) for _ in range(length))
    start = rng.randrange(length - 1)
    entity = EntityMention((start, start), "CHEM", tokens[start])
    free = [i for i in range(length) if i != start]
    keywords = tuple(sorted(rng.sample(free, min(2, len(free)))))
    return build_masked_template(tokens, keywords, (entity,))


class TestWireSchemaGoldenSuite:
    """Shared-schema conformance sweep across all three routes."""

    def test_twenty_score_requests(self, client):
        rng = random.Random(2026)
        words = ("aspirin", "inhibits", "cox2", "plasma", "renal", "dose")
        for i in range(20):
            payload = {
                "sequence": [rng.choice(words)
                             for _ in range(rng.randrange(1, 8))],
                "kind": ("task-logit" if i % 2 == 0
                         else "inference-relativity"),
            }
            if i % 3 == 0:
                payload["restriction_text"] = "one substance lowers another"
            first = client.post("/v1/score", json=payload)
            assert first.status_code == 200
            SCORE_OK.validate(first.json())
            assert client.post("/v1/score", json=payload).json() == first.json()

    def test_ten_infill_templates(self, client):
        rng = random.Random(33)
        for seed in range(10):
            template = random_golden_template(rng)
            response = client.post("/v1/infill",
                                   json=infill_payload(template, seed=seed))
            assert response.status_code == 200
            body = response.json()
            INFILL_OK.validate(body)
            assert MASK_SENTINEL not in body["tokens"]
            for ent in template.entities:
                assert ent.surface in " ".join(body["tokens"])

    def test_five_chat_requests(self, client):
        for seed, user in enumerate(["GRADE: [Insert here]",
                                     "REVIEW: [Insert here]",
                                     "ASPECT: [Insert here]",
                                     "Current augmented sentence: x\n"
                                     "REVISED: [Insert here]",
                                     "free-form question"]):
            response = client.post("/v1/chat",
                                   json=chat_payload(user=user, seed=seed))
            assert response.status_code == 200
            CHAT_OK.validate(response.json())


@pytest.fixture(scope="module")
def live_url():
    """A real uvicorn server on a free port, for the core HTTP clients."""
    server = uvicorn.Server(uvicorn.Config(
        create_app(SidecarConfig()), host="127.0.0.1", port=0,
        log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 15
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class TestLiveClients:
    """The core package's own HTTP clients driving a live service."""

    def test_scorer_client_round_trip(self, live_url):
        scorer = HttpScorer(f"{live_url}/v1/score", "task-logit")
        first = scorer.score(("aspirin", "inhibits", "cox2"))
        assert scorer.score(("aspirin", "inhibits", "cox2")) == first
        relativity = HttpScorer(f"{live_url}/v1/score", "inference-relativity")
        assert relativity.score(("aspirin", "inhibits"),
                                "aspirin inhibits") == 1.0

    def test_generator_client_round_trip(self, live_url):
        generator = HttpGenerator(f"{live_url}/v1/infill")
        template = sample_template(keywords=(1,))
        tokens = generator.infill(template, "one substance lowers another",
                                  "CHEM inhibits DIS", seed=4)
        assert MASK_SENTINEL not in tokens
        assert tokens[0] == "aspirin"
        assert tokens[3:5] == ["renal", "failure"]

    def test_full_debate_against_live_agents(self, live_url):
        agents = [HttpAgent(f"{live_url}/v1/chat", f"live-{i}")
                  for i in range(3)]
        accepted, transcript = run_debate(
            "the drug dose was given", "the drug amount was given", agents,
            rng=random.Random(1))
        assert accepted
        assert transcript.outcome == "accepted"
        assert transcript.final == "the drug amount was given"
        assert all(g.value == 0.85 for it in transcript.iterations
                   for g in it.grades)
