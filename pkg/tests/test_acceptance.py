"""Release gate: one test per acceptance criterion, one verdict line each.

Every test drives the public API against an independent check (brute
force enumeration, frozen hand values, byte comparison) and reports a
single PASS/FAIL line through the terminal summary hook in conftest.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

import pytest

import conftest
import oracles
from bioaug.corpus.io import write_dataset
from bioaug.corpus.model import EntityMention
from bioaug.corpus.targets import AttributionTarget
from bioaug.attribution.maps import (
    AttributionMap,
    lexicon_map,
    normalize_lexicon,
    normalize_relation,
    relation_map,
)
from bioaug.attribution.template import (
    MASK_SENTINEL,
    build_masked_template,
    parse_rendered_template,
    render_marked_entity,
)
from bioaug.attribution.stage import where_stage
from bioaug.backends.mocks import (
    HashScorer,
    InteractionScorer,
    ScriptedExtractor,
    additive_scorer,
    scripted_team,
)
from bioaug.generation.similarity import token_lcs_similarity
from bioaug.generation.structure import extract_key_structure
from bioaug.pipeline.config import RunConfig
from bioaug.pipeline.metrics import (
    answer_accuracy,
    average_micro_f1,
    entity_f1,
    f1_from_counts,
    relation_micro_f1,
)
from bioaug.pipeline.run import augment_dataset
from bioaug.reflection.debate import run_debate, select_judge
from bioaug.reflection.prompts import render_prompt
from golden_vars import GOLDEN_VARS

# Re-used from the metrics unit tests: a relation fixture whose counts
# actually produce tp=4 fp=4 fn=3.
from test_pipeline import re_gold


@contextmanager
def criterion(name: str):
    """Record one PASS/FAIL verdict line for the terminal summary."""
    try:
        yield
    except BaseException:
        conftest.ACCEPTANCE_RESULTS.append((name, "FAIL"))
        print(f"FAIL {name}")
        raise
    conftest.ACCEPTANCE_RESULTS.append((name, "PASS"))
    print(f"PASS {name}")


VOCAB = ("aspirin", "inhibits", "cox2", "dose", "patients", "glucose",
         "insulin", "receptor", "binding", "chronic", "renal", "plasma")


class ConstantScorer:
    """Same scalar for every sequence; every contribution collapses to 0."""

    kind = "task-logit"
    concurrency_safe = True

    def __init__(self, value: float):
        self.value = value

    def score(self, tokens, restriction=None) -> float:
        return self.value


def random_scorer(rng: random.Random):
    choice = rng.randrange(4)
    if choice == 0:
        return additive_scorer(rng.uniform(0.5, 3.0))
    if choice == 1:
        pairs = {(rng.choice(VOCAB), rng.choice(VOCAB)): rng.uniform(-4, 4)
                 for _ in range(3)}
        weights = {w: rng.uniform(-1, 2) for w in rng.sample(VOCAB, 4)}
        return InteractionScorer(weights=weights, default_weight=1.0,
                                 pair_bonuses=pairs)
    if choice == 2:
        return ConstantScorer(rng.uniform(-2, 2))
    return HashScorer(seed=rng.randrange(10 ** 6))


def random_sentence(rng: random.Random):
    """Tokens (<= 12), two disjoint single-or-double token spans."""
    length = rng.randrange(6, 13)
    tokens = tuple(rng.choice(VOCAB) for _ in range(length))
    starts = rng.sample(range(length - 1), 2)
    starts.sort()
    span1 = (starts[0], starts[0])
    width2 = rng.randrange(2) if starts[1] + 1 < length else 0
    span2 = (starts[1], starts[1] + width2)
    return tokens, span1, span2


def test_loo_maps_match_brute_force():
    """Both raw maps equal an independent enumeration on random input."""
    with criterion("loo maps == brute-force enumeration "
                   "(200 sentences, additive/pairwise/constant, 1e-9)"):
        rng = random.Random(99_2026)
        started = time.monotonic()
        checked = 0
        for _ in range(200):
            tokens, span1, span2 = random_sentence(rng)
            scorer = random_scorer(rng)
            target = AttributionTarget(spans=(span1, span2),
                                       restriction_text="relation notion",
                                       labels=("r",))
            lex = lexicon_map(tokens, span1, scorer, target)
            for idx, value in lex.entries.items():
                expected = oracles.lexicon_entry(scorer, tokens, span1, idx)
                assert value == pytest.approx(expected, abs=1e-9)
                checked += 1
            rel = relation_map(tokens, span1, span2, "relation notion",
                               scorer, target)
            a1, a0 = oracles.relation_anchors(scorer, tokens, (span1, span2),
                                              "relation notion")
            assert rel.anchors["full_sentence"] == pytest.approx(a1, abs=1e-9)
            assert rel.anchors["no_entities"] == pytest.approx(a0, abs=1e-9)
            for idx, value in rel.entries.items():
                expected = oracles.relation_entry(
                    scorer, tokens, (span1, span2), "relation notion", idx)
                assert value == pytest.approx(expected, abs=1e-9)
                checked += 1
        assert checked > 1000
        assert time.monotonic() - started < 10.0


def random_map(rng: random.Random, with_anchors: bool):
    indices = rng.sample(range(12), rng.randrange(2, 9))
    # Integer-valued entries: divisions cannot collapse genuine gaps.
    entries = {i: float(rng.randint(-50, 50)) for i in indices}
    anchors = {}
    if with_anchors:
        a0 = float(rng.randint(-20, 20))
        a1 = a0 + float(rng.randint(1, 30))
        anchors = {"full_sentence": a1, "no_entities": a0}
    target = AttributionTarget(spans=(), restriction_text="r", labels=("r",))
    return AttributionMap(tokens=("t",) * 12, entries=entries, target=target,
                          anchors=anchors)


def test_normalizations_pin_anchors_and_preserve_order():
    """Exact anchor values; argsort invariance over 1,000 random maps."""
    with criterion("normalizations pin anchors exactly and preserve "
                   "ordering (1,000 random maps)"):
        rng = random.Random(31_2026)
        for _ in range(1000):
            amap = random_map(rng, with_anchors=False)
            reference = float(rng.randint(1, 40))
            out = normalize_lexicon(amap, reference)
            assert out.ranked() == amap.ranked()
            assert out.anchors == {"reference": 1.0}

            rmap = random_map(rng, with_anchors=True)
            rout = normalize_relation(rmap)
            assert rout.ranked() == rmap.ranked()
            assert rout.anchors == {"full_sentence": 1.0, "no_entities": 0.0}

        # Entries sitting exactly on an anchor land exactly on the pin.
        target = AttributionTarget(spans=(), restriction_text="r",
                                   labels=("r",))
        lex = AttributionMap(tokens=("t",) * 3, entries={0: 7.0, 1: 3.0},
                             target=target)
        assert normalize_lexicon(lex, 7.0).entries[0] == 1.0
        rel = AttributionMap(tokens=("t",) * 3,
                             entries={0: 9.0, 1: 2.0, 2: 5.0}, target=target,
                             anchors={"full_sentence": 9.0,
                                      "no_entities": 2.0})
        rout = normalize_relation(rel)
        assert rout.entries[0] == 1.0
        assert rout.entries[1] == 0.0

        # And a real end-to-end fixture: interaction scorers keep both
        # maps non-degenerate on the first demo instance.
        demo = conftest.load_dataset(conftest.DATA_DIR / "demo_re.jsonl",
                                     "canonical-jsonl")
        notions = conftest.load_notions(conftest.DATA_DIR / "notions.json")
        task = InteractionScorer(default_weight=1.0,
                                 pair_bonuses={("aspirin", "cox2"): 5.0})
        result = where_stage(demo.by_id("re-0"), notions, task,
                             additive_scorer(1.0))
        assert result.map_lexicon.anchors == {"reference": 1.0}
        assert result.map_relation.anchors == {"full_sentence": 1.0,
                                               "no_entities": 0.0}


# Hostile but space-free: tokens never contain whitespace, so the markup
# characters are the only way to attack the rendering.
HOSTILE = ("x|y", "<s:trap>", "a\\b", "pipe|pipe")


def random_template_case(rng: random.Random):
    length = rng.randrange(4, 13)
    tokens = [rng.choice(VOCAB) for _ in range(length)]
    # Entities: 0-3 disjoint spans over a marker vocabulary so each
    # surface occurs exactly once and recovery is well defined.
    n_entities = rng.randrange(4)
    entity_types = ("CHEM", "PROT", "DIS", "T|weird")
    positions = rng.sample(range(length), min(length, n_entities * 2))
    positions.sort()
    entities = []
    used = set()
    for e in range(n_entities):
        if 2 * e + 1 >= len(positions):
            break
        start = positions[2 * e]
        end = start if rng.random() < 0.6 else positions[2 * e] + (
            1 if positions[2 * e] + 1 < length
            and positions[2 * e] + 1 not in used
            and (2 * e + 1 >= len(positions)
                 or positions[2 * e] + 1 <= positions[2 * e + 1]) else 0)
        marker = f"ent{e}{rng.choice(('', 'x', HOSTILE[rng.randrange(4)]))}"
        for i in range(start, end + 1):
            tokens[i] = f"{marker}tok{i}"
            used.add(i)
        surface = " ".join(tokens[start:end + 1])
        entities.append(EntityMention((start, end),
                                      entity_types[rng.randrange(4)], surface))
    blocked = set(used)
    free = [i for i in range(length) if i not in blocked]
    keywords = tuple(sorted(rng.sample(free, min(len(free),
                                                 rng.randrange(0, 4)))))
    return tuple(tokens), keywords, tuple(entities)


def test_masked_template_inversion():
    """500 random triples: render + parse recovers keywords and spans."""
    with criterion("masked-template inversion recovers keywords and "
                   "entity spans (500 random triples)"):
        rng = random.Random(77_2026)
        for _ in range(500):
            tokens, keywords, entities = random_template_case(rng)
            template = build_masked_template(tokens, keywords, entities)
            rendered = template.render()

            # Entity surfaces sit verbatim between their markers.
            for ent in entities:
                assert render_marked_entity(ent) in rendered
                if not any(ch in ent.surface + ent.entity_type
                           for ch in "|<\\"):
                    marked = (f"<s:{ent.entity_type}> {ent.surface} "
                              f"</s:{ent.entity_type}>")
                    assert marked in rendered

            masked, pairs = parse_rendered_template(rendered)
            entity_indices = {i for e in entities for i in e.indices()}
            expected = tuple(
                tok if i in set(keywords) | entity_indices else MASK_SENTINEL
                for i, tok in enumerate(tokens))
            assert masked == expected
            assert pairs == tuple((e.entity_type, e.surface)
                                  for e in entities)

            # Keyword indices recovered from the parse alone.
            recovered_k = tuple(i for i, t in enumerate(masked)
                                if t != MASK_SENTINEL
                                and i not in entity_indices)
            assert recovered_k == keywords

            # Spans recovered by locating each (unique) surface.
            cursor = 0
            for ent in entities:
                want = ent.surface.split(" ")
                width = len(want)
                spans = [s for s in range(cursor, len(masked) - width + 1)
                         if list(masked[s:s + width]) == want]
                assert spans, f"surface lost: {ent.surface!r}"
                start = spans[0]
                assert (start, start + width - 1) == ent.span
                cursor = start + width

            assert template.invert() == (keywords,
                                         tuple(e.span for e in entities))


LCS_PAIRS = [
    ("a b c d", "a b c d", 1.0),
    ("a b c d", "a x c d", 3 / 4),
    ("a b", "c d", 0.0),
    ("a", "a", 1.0),
    ("a b c", "a b", 2 / 3),
    ("a b c d e", "a c e", 3 / 5),
    ("x a y b z", "a b", 2 / 5),
    ("a b c", "c b a", 1 / 3),
    ("a a a", "a a", 2 / 3),
    ("a b a b", "b a b a", 3 / 4),
    ("the cat sat", "the cat sat", 1.0),
    ("the cat sat", "the dog sat", 2 / 3),
    ("alpha beta gamma delta", "beta delta", 2 / 4),
    ("p53 activates apoptosis", "p53 suppresses apoptosis", 2 / 3),
    ("a b c d e f g h", "a b c d", 4 / 8),
    ("m n o", "m n o p q r", 3 / 6),
    ("one two three four five", "five four three two one", 1 / 5),
    ("a, b", "a b", 2 / 3),
    ("drug dose", "drug dose level", 2 / 3),
    ("x y z w", "y x z w", 3 / 4),
]


def test_key_structure_loop():
    """Strict >0.80 acceptance, best-effort exhaustion, exact LCS values."""
    with criterion("key-structure loop honors the strict 0.80 gate and "
                   "20 frozen similarity pairs match exactly"):
        for a, b, expected in LCS_PAIRS:
            assert token_lcs_similarity(a, b) == expected
            assert token_lcs_similarity(b, a) == expected

        target = "aspirin inhibits cox2 signaling in chronic renal disease"
        exemplars = ["aspirin inhibits cox2 signaling in chronic kidney disease"]
        notion = "one substance lowers the activity of another"
        sources = [f"{t} | {notion}" for t in (target, *exemplars)]

        # The second proposal matches the target source exactly (16/16)
        # and the exemplar source at 15/16 = 0.9375, clearing the gate.
        winner = f"{target} | {notion}"
        extractor = ScriptedExtractor(["aspirin inhibits", winner])
        result = extract_key_structure(target, exemplars, notion, extractor)
        assert not result.best_effort
        assert result.rounds == 2
        assert set(result.scores) == set(sources)
        assert all(v > 0.80 for v in result.scores.values())
        assert result.min_score > 0.80

        # Exhaustion: nothing clears the gate; the best worst-score
        # proposal comes back flagged, within max_rounds.
        extractor = ScriptedExtractor(["aspirin inhibits",
                                       "aspirin inhibits cox2",
                                       "aspirin"])
        result = extract_key_structure(target, exemplars, notion, extractor,
                                       max_rounds=3)
        assert result.best_effort
        assert result.rounds == 3
        assert result.text == "aspirin inhibits cox2"
        assert result.min_score <= 0.80


SCHEDULES = [
    ((100,), "accepted", 1, [1.0]),
    ((50, 70, 90), "accepted", 3, [0.5, 0.7, 0.9]),
    ((60,), "exhausted", 5, [0.6] * 5),
    ((80,), "exhausted", 5, [0.8] * 5),  # the sigma gate is strict
    ((81,), "accepted", 1, [0.81]),
    ((0, 100), "accepted", 2, [0.0, 1.0]),
    ((79, 80, 81), "accepted", 3, [0.79, 0.80, 0.81]),
    ((90, 10), "accepted", 1, [0.9]),
    ((10, 20, 30, 40, 100), "accepted", 5, [0.1, 0.2, 0.3, 0.4, 1.0]),
    ((70, 75, 79, 80, 80), "exhausted", 5, [0.7, 0.75, 0.79, 0.8, 0.8]),
]

REVIEW_LINE = "REVIEW: dose ||| concentration ||| token 3"


def test_debate_protocol():
    """Exact schedules, bounded iterations, judge uniformity, reviews."""
    with criterion("debate reproduces 10 grade schedules exactly, stays "
                   "within max_iters, and draws judges uniformly"):
        for schedule, outcome, iters, trajectory in SCHEDULES:
            agents, _ = scripted_team(3, grade_schedule=schedule,
                                      review_line=REVIEW_LINE)
            accepted, transcript = run_debate(
                "the drug dose was given", "the drug concentration was given",
                agents, rng=random.Random(0))
            assert transcript.outcome == outcome
            assert accepted == (outcome == "accepted")
            assert len(transcript.iterations) == iters
            assert len(transcript.iterations) <= 5
            assert [it.acceptance for it in transcript.iterations] == \
                pytest.approx(trajectory)
            # Exactly (n-1) grades and (n-1) aspect reviews per iteration.
            for it in transcript.iterations:
                assert len(it.grades) == 2
                assert len(it.aspect_reviews) == 2
                assert it.judge_id not in {g.grader_id for g in it.grades}

        agents, _ = scripted_team(5)
        rng = random.Random(123)
        counts = [0] * 5
        for _ in range(10_000):
            counts[select_judge(agents, rng)] += 1
        # Binomial(10000, 1/5): sigma = 40, so 3.3 sigma = 132.
        for count in counts:
            assert abs(count - 2000) <= 132


def test_prompt_renders_byte_match_golden_files():
    """Every template render equals its checked-in golden file."""
    with criterion("prompt renders byte-match the 8 golden files"):
        golden_dir = conftest.GOLDEN_DIR
        assert len(GOLDEN_VARS) == 8
        for name in sorted(GOLDEN_VARS):
            rendered = render_prompt(name, GOLDEN_VARS[name])
            golden = (golden_dir / f"{name}.golden.txt").read_text(
                encoding="utf-8")
            assert rendered.encode("utf-8") == golden.encode("utf-8"), name


def test_metrics_match_hand_computed_values():
    """Frozen count fixtures to 1e-12; perfect predictions hit 1.0."""
    with criterion("metrics match hand-computed fixtures to 1e-12"):
        # tp=4 fp=1 fn=3: precision 4/5, recall 4/7 -> micro F1 2/3.
        table = f1_from_counts(4, 1, 3)
        assert table["precision"] == pytest.approx(4 / 5, abs=1e-12)
        assert table["recall"] == pytest.approx(4 / 7, abs=1e-12)
        assert table["f1"] == pytest.approx(2 / 3, abs=1e-12)
        # The counts that do land on 8/15 carry an extra false positive.
        assert f1_from_counts(4, 4, 3)["f1"] == pytest.approx(8 / 15,
                                                              abs=1e-12)

        gold = re_gold(7, 4)
        predictions = {f"g-{i}": "r1" for i in range(4)}
        predictions.update({f"g-{i}": "none" for i in range(4, 7)})
        predictions.update({f"g-{i}": "r2" for i in range(7, 11)})
        table = relation_micro_f1(gold, predictions)
        assert (table["tp"], table["fp"], table["fn"]) == (4, 4, 3)
        assert table["f1"] == pytest.approx(8 / 15, abs=1e-12)

        perfect = {f"g-{i}": ("r1" if i < 7 else "none") for i in range(11)}
        assert relation_micro_f1(gold, perfect)["f1"] == 1.0

        from bioaug.corpus.model import Dataset, Task, TaskInstance
        ner_gold = Dataset([TaskInstance(
            id="n-0", task=Task.NER, tokens=("aspirin", "blocks", "cox2"),
            entities=(EntityMention((0, 0), "CHEM", "aspirin"),
                      EntityMention((2, 2), "PROT", "cox2")))])
        assert entity_f1(ner_gold, {
            "n-0": [{"span": [0, 0], "type": "CHEM"},
                    {"span": [2, 2], "type": "PROT"}]})["f1"] == 1.0

        tc_gold = Dataset([
            TaskInstance(id="t-0", task=Task.TC, tokens=("x",), entities=(),
                         topic="cardio"),
            TaskInstance(id="t-1", task=Task.TC, tokens=("y",), entities=(),
                         topic="neuro"),
        ])
        table = average_micro_f1(tc_gold, {"t-0": ["cardio"],
                                           "t-1": ["neuro", "cardio"]})
        assert table["average_micro_f1"] == pytest.approx((1 + 2 / 3) / 2,
                                                          abs=1e-12)

        qa_gold = Dataset([TaskInstance(
            id="q-0", task=Task.QA, tokens=("x",), entities=(), question="?",
            answer="cox2 enzyme")])
        assert answer_accuracy(qa_gold,
                               {"q-0": " COX2   enzyme "})["accuracy"] == 1.0


def test_end_to_end_determinism(tmp_path):
    """Byte-identical outputs across repeat runs at three proportions."""
    with criterion("augment is byte-identical across 3 runs at proportion "
                   "0 / 0.5 / 1 and finishes in time"):
        demo_path = conftest.DATA_DIR / "demo_re.jsonl"
        notions_path = conftest.DATA_DIR / "notions.json"
        for proportion in (0.0, 0.5, 1.0):
            artifacts = []
            for attempt in range(3):
                cfg = RunConfig(dataset=str(demo_path),
                                notions=str(notions_path),
                                proportion=proportion, seed=7)
                started = time.monotonic()
                out, report = augment_dataset(cfg)
                assert time.monotonic() - started < 30.0
                path = tmp_path / f"out-{proportion}-{attempt}.jsonl"
                write_dataset(out, path)
                artifacts.append((path.read_bytes(), report.dump()))
            assert artifacts[0] == artifacts[1] == artifacts[2]
            if proportion == 0.0:
                assert artifacts[0][0] == demo_path.read_bytes()
