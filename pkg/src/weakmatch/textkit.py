"""Text utilities for similarity labeling functions.

Four composable dimensions: preprocessing steps, tokenizers, token
weighting, and distance functions. A :class:`PipelineConfig` names one
choice per dimension; similarity = 1 - distance is what LF thresholds
are written against.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .stemming import porter_stem

PREPROCESS_STEPS = ("lowercase", "strip-punctuation", "collapse-whitespace", "stem")
WEIGHTINGS = ("uniform", "tf-idf")
SET_DISTANCES = ("jaccard", "weighted-jaccard", "cosine", "overlap-coefficient")
STRING_DISTANCES = ("edit-distance-normalized",)
DISTANCES = SET_DISTANCES + STRING_DISTANCES

_TOKENIZER_RE = re.compile(r"^(whitespace|qgram\((\d+)\)|word\+qgram\((\d+)\))$")


class PipelineError(ValueError):
    """Raised for an invalid pipeline configuration or operand mismatch."""


def parse_tokenizer(tokenizer: str) -> tuple[str, int]:
    """Split a tokenizer name into (kind, q); q is 0 for whitespace."""
    m = _TOKENIZER_RE.match(tokenizer)
    if not m:
        raise PipelineError(f"unknown tokenizer {tokenizer!r}")
    if tokenizer == "whitespace":
        return "whitespace", 0
    q = int(m.group(2) or m.group(3))
    if q < 2:
        raise PipelineError(f"qgram size must be >= 2, got {q}")
    kind = "qgram" if tokenizer.startswith("qgram") else "word+qgram"
    return kind, q


@dataclass(frozen=True)
class PipelineConfig:
    """One similarity pipeline: preprocess -> tokenize -> weigh -> distance.

    edit-distance-normalized operates on the preprocessed strings and
    ignores the tokenizer and weighting fields.
    """

    preprocess: tuple[str, ...] = ("lowercase",)
    tokenizer: str = "whitespace"
    weighting: str = "uniform"
    distance: str = "jaccard"

    def validate(self) -> list[str]:
        """Return human-readable problems; empty list means valid."""
        problems = []
        for step in self.preprocess:
            if step not in PREPROCESS_STEPS:
                problems.append(f"unknown preprocess step {step!r}")
        try:
            parse_tokenizer(self.tokenizer)
        except PipelineError as e:
            problems.append(str(e))
        if self.weighting not in WEIGHTINGS:
            problems.append(f"unknown weighting {self.weighting!r}")
        if self.distance not in DISTANCES:
            problems.append(f"unknown distance {self.distance!r}")
        return problems


def preprocess(text: str, steps: tuple[str, ...] | list[str]) -> str:
    """Apply preprocessing steps in order. Deterministic; empty in, empty out."""
    out = text
    for step in steps:
        if step == "lowercase":
            out = out.lower()
        elif step == "strip-punctuation":
            # punctuation becomes a space so it separates rather than fuses tokens
            out = "".join(c if c.isalnum() or c.isspace() else " " for c in out)
        elif step == "collapse-whitespace":
            out = " ".join(out.split())
        elif step == "stem":
            out = " ".join(porter_stem(w) for w in out.split())
        else:
            raise PipelineError(f"unknown preprocess step {step!r}")
    return out


def tokenize(text: str, tokenizer: str) -> Counter:
    """Tokenize into a multiset.

    whitespace splits on runs of spaces; qgram(q) emits overlapping
    character q-grams of the string padded with q-1 '#' on each side;
    word+qgram(q) is the multiset union of both.
    """
    kind, q = parse_tokenizer(tokenizer)
    if kind == "whitespace":
        return Counter(text.split())
    grams: Counter = Counter()
    if text:
        padded = "#" * (q - 1) + text + "#" * (q - 1)
        grams = Counter(padded[i : i + q] for i in range(len(padded) - q + 1))
    if kind == "qgram":
        return grams
    return Counter(text.split()) + grams


class CorpusStats:
    """Document frequencies over both tables.

    Every nonempty attribute value across both tables counts as one
    document. Frequencies depend on the preprocess/tokenizer pair in
    use, so they are computed lazily per pair and cached. Immutable
    from the outside once built.
    """

    def __init__(self, documents: list[str]):
        self._documents = [d for d in documents if d]
        self._cache: dict[tuple, tuple[Counter, int]] = {}

    @classmethod
    def from_tables(cls, tables) -> "CorpusStats":
        docs = []
        for table in (tables.left, tables.right):
            for t in table.tuples:
                docs.extend(t.attributes.get(a, "") for a in tables.schema)
        return cls(docs)

    @property
    def n_documents(self) -> int:
        return len(self._documents)

    def document_frequencies(self, steps: tuple[str, ...], tokenizer: str) -> Counter:
        key = (tuple(steps), tokenizer)
        hit = self._cache.get(key)
        if hit is None:
            df: Counter = Counter()
            for doc in self._documents:
                df.update(set(tokenize(preprocess(doc, steps), tokenizer)))
            hit = (df, len(self._documents))
            self._cache[key] = hit
        return hit[0]


def idf(df: int, n_documents: int) -> float:
    return math.log((n_documents + 1) / (df + 1))


def weigh(
    tokens: Counter,
    weighting: str,
    corpus_stats: CorpusStats | None = None,
    steps: tuple[str, ...] = (),
    tokenizer: str = "whitespace",
) -> dict[str, float]:
    """Turn a token multiset into a weighted token set.

    uniform assigns 1.0 per distinct token; tf-idf assigns
    tf * ln((N+1)/(df+1)), with df = 0 for tokens unseen in the corpus.
    """
    if weighting == "uniform":
        return {t: 1.0 for t in tokens}
    if weighting == "tf-idf":
        if corpus_stats is None:
            raise PipelineError("tf-idf weighting requires corpus stats")
        df = corpus_stats.document_frequencies(tuple(steps), tokenizer)
        n = corpus_stats.n_documents
        return {t: tf * idf(df.get(t, 0), n) for t, tf in tokens.items()}
    raise PipelineError(f"unknown weighting {weighting!r}")


def _mass(weights: dict[str, float]) -> float:
    return sum(weights.values())


def weighted_jaccard_distance(a: dict[str, float], b: dict[str, float]) -> float:
    num = 0.0
    den = 0.0
    for t in a.keys() | b.keys():
        wa, wb = a.get(t, 0.0), b.get(t, 0.0)
        num += min(wa, wb)
        den += max(wa, wb)
    if den == 0.0:
        # both zero-mass: identical nothings
        return 0.0 if _mass(a) == _mass(b) else 1.0
    return 1.0 - num / den


def jaccard_distance(a: dict[str, float], b: dict[str, float]) -> float:
    # set-based: ignores weights entirely
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 0.0
    if not sa or not sb:
        return 1.0
    return 1.0 - len(sa & sb) / len(sa | sb)


def cosine_distance(a: dict[str, float], b: dict[str, float]) -> float:
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    if na == 0.0 and nb == 0.0:
        return 0.0
    if na == 0.0 or nb == 0.0:
        return 1.0
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    return min(1.0, max(0.0, 1.0 - dot / (na * nb)))


def overlap_coefficient_distance(a: dict[str, float], b: dict[str, float]) -> float:
    ma, mb = _mass(a), _mass(b)
    if ma == 0.0 and mb == 0.0:
        return 0.0
    if ma == 0.0 or mb == 0.0:
        return 1.0
    num = sum(min(w, b[t]) for t, w in a.items() if t in b)
    return 1.0 - num / min(ma, mb)


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_distance_normalized(a: str, b: str) -> float:
    if not a and not b:
        return 0.0
    return levenshtein(a, b) / max(len(a), len(b))


_SET_DISPATCH = {
    "jaccard": jaccard_distance,
    "weighted-jaccard": weighted_jaccard_distance,
    "cosine": cosine_distance,
    "overlap-coefficient": overlap_coefficient_distance,
}


def distance(a, b, kind: str) -> float:
    """Dispatch on distance kind; 0 means identical.

    Set distances take weighted token dicts; edit-distance-normalized
    takes plain strings. Mixing operand kinds raises PipelineError.
    """
    if kind in _SET_DISPATCH:
        if not isinstance(a, dict) or not isinstance(b, dict):
            raise PipelineError(f"{kind} expects weighted token sets")
        return _SET_DISPATCH[kind](a, b)
    if kind == "edit-distance-normalized":
        if not isinstance(a, str) or not isinstance(b, str):
            raise PipelineError("edit-distance-normalized expects strings")
        return edit_distance_normalized(a, b)
    raise PipelineError(f"unknown distance {kind!r}")


def pipeline_similarity(
    config: PipelineConfig,
    text_a: str,
    text_b: str,
    corpus_stats: CorpusStats | None = None,
) -> float:
    """Similarity (1 - distance) of two raw strings under a pipeline."""
    a = preprocess(text_a, config.preprocess)
    b = preprocess(text_b, config.preprocess)
    if config.distance in STRING_DISTANCES:
        return 1.0 - edit_distance_normalized(a, b)
    wa = weigh(tokenize(a, config.tokenizer), config.weighting, corpus_stats,
               config.preprocess, config.tokenizer)
    wb = weigh(tokenize(b, config.tokenizer), config.weighting, corpus_stats,
               config.preprocess, config.tokenizer)
    return 1.0 - distance(wa, wb, config.distance)


class TupleTextPipeline:
    """Per-tuple cached view of one pipeline over chosen attributes.

    Precomputes the processed representation (string or weighted token
    set) for each tuple it sees, so scoring many pairs against the same
    tuples does linear, not quadratic, text work.
    """

    def __init__(self, config: PipelineConfig, attrs: tuple[str, ...],
                 corpus_stats: CorpusStats | None = None):
        self.config = config
        self.attrs = tuple(attrs)
        self.corpus_stats = corpus_stats
        self._reps: dict[tuple[str, str], object] = {}

    def _rep(self, side: str, tup) -> object:
        key = (side, tup.id)
        rep = self._reps.get(key)
        if rep is None:
            text = preprocess(tup.text(self.attrs), self.config.preprocess)
            if self.config.distance in STRING_DISTANCES:
                rep = text
            else:
                rep = weigh(tokenize(text, self.config.tokenizer),
                            self.config.weighting, self.corpus_stats,
                            self.config.preprocess, self.config.tokenizer)
            self._reps[key] = rep
        return rep

    def similarity(self, left_tuple, right_tuple) -> float:
        ra = self._rep("L", left_tuple)
        rb = self._rep("R", right_tuple)
        if self.config.distance in STRING_DISTANCES:
            return 1.0 - edit_distance_normalized(ra, rb)
        return 1.0 - distance(ra, rb, self.config.distance)
