#!/usr/bin/env python3
"""Regenerate the toy fixture under tests/fixtures/toy/.

The fixture is a ~50-word aggregated norms file plus lexicons and prime
specs, small enough for fast end-to-end runs but rich enough to exercise
every pipeline stage. One emotion's target set is chosen adversarially so
that its paired-difference effect flips sign between L1 and L2
normalization, which the norm-sensitivity acceptance check relies on.

Deterministic: a fixed seed reproduces the committed files byte for byte.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from assocnet.activation import SpreadParams, normalize_matrix, spread_batch
from assocnet.bias import emotion_bias
from assocnet.ingest import EMOTION_NAMES, NormRecord, load_lexicons, load_prime_spec
from assocnet.network import build_network, diameter

SEED = 1

GENDER_PAIRS = [
    ["woman", "man"],
    ["female", "male"],
    ["girl", "boy"],
    ["mother", "father"],
    ["feminine", "masculine"],
]
GENDER_TARGETS_F = ["warm", "gentle", "caring"]
GENDER_TARGETS_M = ["strong", "bold", "tough"]
RELIGION_PRIMES = ["christian", "muslim", "buddhist"]
POLITICAL_PAIR = ["democrat", "republican"]

CONTEXT_WORDS = [
    "people", "group", "leader", "nation", "belief", "vote", "party", "law",
    "peace", "war", "money", "work", "school", "family", "child", "home",
    "love", "hate", "rage", "dread", "panic", "gloom", "sorrow", "smile",
    "delight", "hope", "eager", "gross", "filth", "shock", "gasp", "faith",
    "loyal", "honest", "wonder", "dessert", "ice cream",
]

EMOTION_SEEDS = {
    "anger": ["rage", "hate", "war"],
    "anticipation": ["hope", "eager", "vote"],
    "disgust": ["gross", "filth"],
    "fear": ["dread", "panic", "war"],
    "joy": ["smile", "delight", "love"],
    "sadness": ["gloom", "sorrow"],
    "trust": ["faith", "loyal", "honest"],
    # "surprise" is filled with the norm-sensitive band below
}

PINNED_VALENCE = {
    "warm": 0.9, "gentle": 0.85, "caring": 0.9, "love": 0.95, "smile": 0.9,
    "war": 0.05, "hate": 0.05, "filth": 0.1, "gross": 0.15, "rage": 0.1,
    "peace": 0.9, "tough": 0.45, "bold": 0.6, "strong": 0.7,
}

UNRATED = {"ice cream", "gasp", "vote"}


def all_words():
    words = [w for pair in GENDER_PAIRS for w in pair]
    words += GENDER_TARGETS_F + GENDER_TARGETS_M
    words += RELIGION_PRIMES + POLITICAL_PAIR + CONTEXT_WORDS
    seen = []
    for w in words:
        if w not in seen:
            seen.append(w)
    return seen


def make_records(rng, words):
    """Hub-backbone plus random extra edges, all aggregated and unique."""
    hubs = ["people", "group", "family", "belief", "party"]
    pairs = {}

    def add(cue, resp, count):
        if cue == resp:
            return
        if (cue, resp) in pairs or (resp, cue) in pairs:
            return
        pairs[(cue, resp)] = count

    for i, word in enumerate(words):
        hub = hubs[i % len(hubs)]
        add(word, hub, int(rng.integers(2, 12)))
    for _ in range(230):
        cue, resp = rng.choice(words, size=2, replace=False)
        add(str(cue), str(resp), int(rng.integers(1, 30)))
    # a few deliberately asymmetric strong associations
    add("democrat", "vote", 25)
    add("republican", "law", 22)
    add("democrat", "hope", 14)
    add("republican", "money", 17)
    add("feminine", "warm", 18)
    add("masculine", "tough", 19)
    add("mother", "caring", 21)
    add("father", "strong", 16)
    add("dessert", "ice cream", 24)
    return [NormRecord(c, r, n) for (c, r), n in sorted(pairs.items())]


def pick_norm_sensitive_words(net, words):
    """Nodes whose democrat-republican difference flips sign between norms."""
    params = SpreadParams.resolve(net, diameter(net, "exact"))
    raw = spread_batch(net, tuple(POLITICAL_PAIR), params)
    flips = {}
    for norm in ("l1", "l2"):
        m = normalize_matrix(raw, norm)
        flips[norm] = m.column("democrat") - m.column("republican")
    rows = {label: i for i, label in enumerate(net.labels)}
    band = []
    for w in words:
        if w in POLITICAL_PAIR or w not in rows:
            continue
        d1, d2 = flips["l1"][rows[w]], flips["l2"][rows[w]]
        if d1 > 0 > d2 or d1 < 0 < d2:
            band.append((w, float(d1), float(d2)))
    positive_l1 = [w for w, d1, _ in band if d1 > 0]
    negative_l1 = [w for w, d1, _ in band if d1 < 0]
    chosen = positive_l1 if len(positive_l1) >= len(negative_l1) else negative_l1
    return chosen, band


def main():
    rng = np.random.default_rng(SEED)
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "toy"
    (out / "specs").mkdir(parents=True, exist_ok=True)

    words = all_words()
    records = make_records(rng, words)
    net = build_network(records, min_weight=2)
    missing = [w for w in words if w not in net.labels]
    assert not missing, f"words dropped from the toy network: {missing}"

    surprise_words, band = pick_norm_sensitive_words(net, words)
    assert len(surprise_words) >= 2, f"need >= 2 norm-sensitive words, found {band}"

    emotion_sets = dict(EMOTION_SEEDS)
    emotion_sets["surprise"] = surprise_words

    norms_text = "".join(f"{r.cue}\t{r.response}\t{r.count}\n" for r in records)
    (out / "norms.tsv").write_text(norms_text, encoding="utf-8")

    (out / "vocabulary.txt").write_text(
        "".join(w + "\n" for w in sorted(words)), encoding="utf-8"
    )

    valence_lines = []
    for w in sorted(words):
        if w in UNRATED:
            continue
        value = PINNED_VALENCE.get(w)
        if value is None:
            value = round(float(rng.uniform(0.1, 0.9)), 3)
        valence_lines.append(f"{w}\t{value}\n")
    (out / "valence.tsv").write_text("".join(valence_lines), encoding="utf-8")

    emotion_lines = []
    for emotion in EMOTION_NAMES:
        for w in sorted(set(emotion_sets[emotion])):
            emotion_lines.append(f"{w}\t{emotion}\t1\n")
    (out / "emotions.tsv").write_text("".join(emotion_lines), encoding="utf-8")

    specs = {
        "gender.json": {
            "identity": "gender",
            "approach": "stereotypes",
            "prime_pairs": GENDER_PAIRS,
            "targets": {"female": GENDER_TARGETS_F, "male": GENDER_TARGETS_M},
        },
        "religion.json": {
            "identity": "religion",
            "approach": "valence",
            "primes": RELIGION_PRIMES,
        },
        "political.json": {
            "identity": "political",
            "approach": "emotions",
            "prime_pairs": [POLITICAL_PAIR],
        },
    }
    for name, doc in specs.items():
        (out / "specs" / name).write_text(
            json.dumps(doc, indent=2) + "\n", encoding="utf-8"
        )

    config = {
        "norms": "norms.tsv",
        "norms_format": "aggregated",
        "vocabulary": "vocabulary.txt",
        "valence_lexicon": "valence.tsv",
        "emotion_lexicon": "emotions.tsv",
        "prime_specs": ["specs/gender.json", "specs/religion.json", "specs/political.json"],
        "min_weight": 2,
        "streams": [
            {"prime": "feminine", "target": "warm", "cost_mode": "inverse_weight"},
            {"prime": "feminine", "target": "tough", "cost_mode": "inverse_weight"},
        ],
        "output_dir": "out",
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")

    verify(out, net)
    print(f"toy fixture written to {out}")
    print(f"norm-sensitive surprise set: {surprise_words}")


def verify(out, net):
    """The committed fixture must actually flip an emotion sign across norms."""
    with open(out / "valence.tsv", encoding="utf-8") as vfh, open(
        out / "emotions.tsv", encoding="utf-8"
    ) as efh:
        lex = load_lexicons(vfh, efh)
    with open(out / "specs" / "political.json", encoding="utf-8") as fh:
        spec = load_prime_spec(fh)
    params = SpreadParams.resolve(net, diameter(net, "exact"))
    raw = spread_batch(net, spec.all_primes(), params)
    signs = {}
    for norm in ("l1", "l2"):
        report = emotion_bias(normalize_matrix(raw, norm), spec, lex)
        signs[norm] = {label: np.sign(r.effect_size) for label, r in report.results}
    flipped = [e for e in EMOTION_NAMES if signs["l1"][e] != signs["l2"][e]]
    assert flipped, "fixture is not norm-sensitive; adjust the seed"
    print(f"emotions with sign flips between norms: {flipped}")


if __name__ == "__main__":
    main()
