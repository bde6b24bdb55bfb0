"""Parsers for free-association norms, lexicons, and prime/target configuration.

Input formats (all UTF-8, TAB-separated unless noted):

  trial norms       cue<TAB>R1<TAB>R2<TAB>R3, "NA" marks a missing response;
                    an optional header line is detected by a literal first
                    cell "cue"
  aggregated norms  cue<TAB>response<TAB>count
  valence lexicon   word<TAB>valence, valence a real in [0, 1]
  emotion lexicon   word<TAB>emotion<TAB>flag, flag in {0, 1} (NRC layout)
  vocabulary        one word per line
  prime spec        JSON document, see `load_prime_spec`

Tokens are trimmed and lowercased on ingestion; no lemmatization or spelling
correction is applied (norm datasets are preprocessed upstream). Multi-word
tokens are kept as single tokens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError

EMOTION_NAMES = (
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
)

APPROACHES = ("stereotypes", "valence", "emotions")


def normalize_token(token: str) -> str:
    """Canonical token form: surrounding whitespace stripped, lowercased."""
    return token.strip().lower()


def _check_token(token: str, what: str, line=None) -> str:
    if token == "":
        raise ValidationError(f"empty {what}", line=line)
    if "\t" in token or "\n" in token or "\r" in token:
        raise ValidationError(f"{what} contains tab/newline: {token!r}", line=line)
    return token


@dataclass(frozen=True)
class NormRecord:
    """One aggregated cue -> response association with its frequency count."""

    cue: str
    response: str
    count: int

    def __post_init__(self):
        _check_token(self.cue, "cue")
        _check_token(self.response, "response")
        if self.count < 1:
            raise ValidationError(f"count must be >= 1, got {self.count}")


def parse_trials(stream, format: str = "trial") -> list[NormRecord]:
    """Parse a norms file into aggregated records.

    Trial rows expand to one (cue, response, 1) record per non-"NA" response
    and duplicates are summed into counts, in first-seen order. Aggregated
    rows pass through unchanged (no duplicate merging). "NA" detection is a
    case-sensitive exact match on the stripped cell.
    """
    if format == "trial":
        return _parse_trial_rows(stream)
    if format == "aggregated":
        return _parse_aggregated_rows(stream)
    raise ValueError(f"unknown norms format: {format!r}")


def _parse_trial_rows(stream) -> list[NormRecord]:
    counts: dict[tuple[str, str], int] = {}
    for lineno, line in enumerate(stream, 1):
        row = line.rstrip("\n")
        if row.strip() == "":
            continue
        cells = row.split("\t")
        if lineno == 1 and cells[0].strip() == "cue":
            continue
        if len(cells) != 4:
            raise ParseError(f"expected 4 columns, got {len(cells)}", line=lineno)
        cue = _check_token(normalize_token(cells[0]), "cue", line=lineno)
        for cell in cells[1:]:
            if cell.strip() == "NA":
                continue
            response = _check_token(normalize_token(cell), "response", line=lineno)
            key = (cue, response)
            counts[key] = counts.get(key, 0) + 1
    return [NormRecord(cue, response, n) for (cue, response), n in counts.items()]


def _parse_aggregated_rows(stream) -> list[NormRecord]:
    records = []
    for lineno, line in enumerate(stream, 1):
        row = line.rstrip("\n")
        if row.strip() == "":
            continue
        cells = row.split("\t")
        if len(cells) != 3:
            raise ParseError(f"expected 3 columns, got {len(cells)}", line=lineno)
        raw_count = cells[2].strip()
        if lineno == 1 and cells[0].strip() == "cue" and not _is_int(raw_count):
            continue
        if not _is_int(raw_count):
            raise ParseError(f"count is not an integer: {raw_count!r}", line=lineno)
        count = int(raw_count)
        if count <= 0:
            raise ValidationError(f"count must be positive, got {count}", line=lineno)
        cue = _check_token(normalize_token(cells[0]), "cue", line=lineno)
        response = _check_token(normalize_token(cells[1]), "response", line=lineno)
        records.append(NormRecord(cue, response, count))
    return records


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


def format_aggregated(records) -> str:
    """Serialize records to canonical aggregated TSV (inverse of parsing)."""
    return "".join(f"{r.cue}\t{r.response}\t{r.count}\n" for r in records)


@dataclass(frozen=True)
class Lexicon:
    """Word -> valence ratings plus emotion -> word-set memberships."""

    valence: dict[str, float]
    emotions: dict[str, frozenset[str]]

    def __post_init__(self):
        unknown = set(self.emotions) - set(EMOTION_NAMES)
        if unknown:
            raise ValidationError(f"unknown emotion names: {sorted(unknown)}")
        bad = {w: v for w, v in self.valence.items() if not 0.0 <= v <= 1.0}
        if bad:
            raise ValidationError(f"valence values outside [0, 1]: {bad}")


def load_lexicons(valence_stream, emotion_stream) -> Lexicon:
    """Load the valence and emotion lexicons into a single `Lexicon`.

    A duplicate word in the valence file is an error rather than a silent
    overwrite. Emotion membership has set semantics: flag 1 adds the word,
    flag 0 rows are ignored, so loading is order-independent.
    """
    valence: dict[str, float] = {}
    for lineno, line in enumerate(valence_stream, 1):
        row = line.rstrip("\n")
        if row.strip() == "":
            continue
        cells = row.split("\t")
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, got {len(cells)}", line=lineno)
        word = _check_token(normalize_token(cells[0]), "word", line=lineno)
        try:
            value = float(cells[1].strip())
        except ValueError:
            raise ParseError(f"valence is not a number: {cells[1]!r}", line=lineno)
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"valence {value} outside [0, 1]", line=lineno)
        if word in valence:
            raise ValidationError(f"duplicate word in valence lexicon: {word!r}", line=lineno)
        valence[word] = value

    members: dict[str, set[str]] = {name: set() for name in EMOTION_NAMES}
    for lineno, line in enumerate(emotion_stream, 1):
        row = line.rstrip("\n")
        if row.strip() == "":
            continue
        cells = row.split("\t")
        if len(cells) != 3:
            raise ParseError(f"expected 3 columns, got {len(cells)}", line=lineno)
        word = _check_token(normalize_token(cells[0]), "word", line=lineno)
        emotion = normalize_token(cells[1])
        if emotion not in members:
            raise ValidationError(f"unknown emotion name: {emotion!r}", line=lineno)
        flag = cells[2].strip()
        if flag not in ("0", "1"):
            raise ValidationError(f"flag must be 0 or 1, got {flag!r}", line=lineno)
        if flag == "1":
            members[emotion].add(word)

    return Lexicon(
        valence=valence,
        emotions={name: frozenset(words) for name, words in members.items()},
    )


def load_vocabulary(stream) -> frozenset[str]:
    """Load a vocabulary filter file: one word per line, blanks skipped."""
    words = set()
    for line in stream:
        token = normalize_token(line)
        if token:
            words.add(token)
    return frozenset(words)


@dataclass(frozen=True)
class PrimeSpec:
    """Configuration of one social identity's primes and optional targets.

    The shape depends on the approach:

      stereotypes  >= 1 (first, second) prime pairs and exactly two named
                   target sets; the first set belongs to the first member
                   of each pair
      valence      a flat list of >= 3 prime words, no targets
      emotions     exactly one prime pair, no targets (targets come from
                   the emotion lexicon)
    """

    identity: str
    approach: str
    prime_pairs: tuple[tuple[str, str], ...] = ()
    primes: tuple[str, ...] = ()
    targets: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.identity:
            raise ValidationError("prime spec: identity must be non-empty")
        if self.approach not in APPROACHES:
            raise ValidationError(f"prime spec: unknown approach {self.approach!r}")
        if self.approach == "stereotypes":
            if len(self.prime_pairs) < 1:
                raise ValidationError("stereotypes approach requires >= 1 prime pair")
            if self.primes:
                raise ValidationError("stereotypes approach takes prime_pairs, not primes")
            if len(self.targets) != 2:
                raise ValidationError(
                    f"stereotypes approach requires exactly two target sets, got {len(self.targets)}"
                )
        elif self.approach == "valence":
            if len(self.primes) < 3:
                raise ValidationError("valence approach requires >= 3 primes")
            if self.prime_pairs:
                raise ValidationError("valence approach takes primes, not prime_pairs")
            if self.targets:
                raise ValidationError("valence approach takes no target sets")
        else:
            if len(self.prime_pairs) != 1:
                raise ValidationError("emotions approach requires exactly one prime pair")
            if self.primes:
                raise ValidationError("emotions approach takes prime_pairs, not primes")
            if self.targets:
                raise ValidationError("emotions approach takes no target sets")
        flat = self.all_primes()
        if len(set(flat)) != len(flat):
            raise ValidationError("prime words must be distinct within a spec")
        for name, words in self.targets.items():
            if not words:
                raise ValidationError(f"target set {name!r} is empty")
            if len(set(words)) != len(words):
                raise ValidationError(f"target set {name!r} contains duplicates")

    def all_primes(self) -> tuple[str, ...]:
        """All prime words in column order (pair members interleaved)."""
        if self.primes:
            return self.primes
        return tuple(word for pair in self.prime_pairs for word in pair)


_SPEC_KEYS = {"identity", "approach", "prime_pairs", "primes", "targets"}


def load_prime_spec(stream) -> PrimeSpec:
    """Load and validate a prime-spec JSON document."""
    try:
        doc = json.load(stream)
    except json.JSONDecodeError as exc:
        raise ParseError(f"prime spec is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ParseError("prime spec must be a JSON object")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise ValidationError(f"prime spec: unknown fields {sorted(unknown)}")

    identity = doc.get("identity")
    approach = doc.get("approach")
    if not isinstance(identity, str) or not isinstance(approach, str):
        raise ValidationError("prime spec: identity and approach must be strings")

    pairs = []
    for pair in doc.get("prime_pairs", []):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValidationError(f"prime pair must have exactly two words: {pair!r}")
        pairs.append(tuple(_check_token(normalize_token(w), "prime") for w in pair))

    primes = tuple(
        _check_token(normalize_token(w), "prime") for w in doc.get("primes", [])
    )

    targets_doc = doc.get("targets", {})
    if not isinstance(targets_doc, dict):
        raise ValidationError("prime spec: targets must be an object of named lists")
    targets = {}
    for name, words in targets_doc.items():
        if not isinstance(words, list):
            raise ValidationError(f"target set {name!r} must be a list")
        targets[normalize_token(name)] = tuple(
            _check_token(normalize_token(w), "target") for w in words
        )

    return PrimeSpec(
        identity=normalize_token(identity),
        approach=approach.strip().lower(),
        prime_pairs=tuple(pairs),
        primes=primes,
        targets=targets,
    )
