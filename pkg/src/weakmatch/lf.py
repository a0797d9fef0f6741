"""Declarative labeling functions over candidate pairs.

An LF is a small spec, not arbitrary code: either a similarity pipeline
with match/unmatch thresholds, or a regex-extract-and-compare rule.
Specs serialize to a canonical human-editable text format (TOML
key/value with nested sections); the content hash of that canonical
form versions each LF for incremental application.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass

import numpy as np
import tomli

from .tables import ABSTAIN, MATCH, NONMATCH, VOTE_VALUES, CandidatePair, TablePair
from .textkit import (
    CorpusStats,
    PipelineConfig,
    TupleTextPipeline,
)

COMPARATOR_RE = re.compile(r"^(equal|not-equal|absolute-diff-gt\(([-+0-9.eE]+)\))$")


@dataclass(frozen=True)
class SimilarityLF:
    """Vote by thresholding pipeline similarity of concatenated attributes."""

    attrs: tuple[str, ...]
    pipeline: PipelineConfig
    match_if_sim_ge: float | None = None
    unmatch_if_sim_le: float | None = None


@dataclass(frozen=True)
class Extractor:
    attrs: tuple[str, ...]
    pattern: str


@dataclass(frozen=True)
class RuleLF:
    """Extract one value per side via regex, compare, and vote.

    when_missing fires when either side's extraction finds no match
    (or, for the numeric comparator, the capture does not parse).
    """

    extract_left: Extractor
    extract_right: Extractor
    comparator: str  # equal | not-equal | absolute-diff-gt(<delta>)
    when_true: int
    when_false: int
    when_missing: int


@dataclass(frozen=True)
class LabelFunctionSpec:
    name: str
    origin: str  # user | auto
    body: SimilarityLF | RuleLF


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        raise TypeError("no booleans in LF specs")
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return json.dumps(v)  # valid TOML basic string
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def serialize_spec(spec: LabelFunctionSpec) -> str:
    """Canonical text form: fixed field order, one fact per line.

    Equal specs serialize identically, so the content hash doubles as
    the LF version.
    """
    lines = [
        f"name = {_fmt_value(spec.name)}",
        f"origin = {_fmt_value(spec.origin)}",
    ]
    body = spec.body
    if isinstance(body, SimilarityLF):
        lines.append('kind = "similarity"')
        lines.append("")
        lines.append("[similarity]")
        lines.append(f"attrs = {_fmt_value(list(body.attrs))}")
        if body.match_if_sim_ge is not None:
            lines.append(f"match_if_sim_ge = {_fmt_value(float(body.match_if_sim_ge))}")
        if body.unmatch_if_sim_le is not None:
            lines.append(f"unmatch_if_sim_le = {_fmt_value(float(body.unmatch_if_sim_le))}")
        lines.append("")
        lines.append("[similarity.pipeline]")
        p = body.pipeline
        lines.append(f"preprocess = {_fmt_value(list(p.preprocess))}")
        lines.append(f"tokenizer = {_fmt_value(p.tokenizer)}")
        lines.append(f"weighting = {_fmt_value(p.weighting)}")
        lines.append(f"distance = {_fmt_value(p.distance)}")
    else:
        lines.append('kind = "rule"')
        lines.append("")
        lines.append("[rule]")
        lines.append(f"comparator = {_fmt_value(body.comparator)}")
        lines.append(f"when_true = {_fmt_value(body.when_true)}")
        lines.append(f"when_false = {_fmt_value(body.when_false)}")
        lines.append(f"when_missing = {_fmt_value(body.when_missing)}")
        for section, ex in (("extract_left", body.extract_left),
                            ("extract_right", body.extract_right)):
            lines.append("")
            lines.append(f"[rule.{section}]")
            lines.append(f"attrs = {_fmt_value(list(ex.attrs))}")
            lines.append(f"pattern = {_fmt_value(ex.pattern)}")
    return "\n".join(lines) + "\n"


def spec_hash(spec: LabelFunctionSpec) -> str:
    return hashlib.sha256(serialize_spec(spec).encode("utf-8")).hexdigest()


class SpecFormatError(ValueError):
    """Raised when LF spec text cannot be parsed at all."""


def parse_spec(text: str) -> LabelFunctionSpec:
    """Parse the LF text format back into a spec (inverse of serialize)."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise SpecFormatError(f"bad LF spec: {e}") from None
    try:
        name = doc["name"]
        origin = doc.get("origin", "user")
        kind = doc["kind"]
        if kind == "similarity":
            sec = doc["similarity"]
            pipe = sec["pipeline"]
            body: SimilarityLF | RuleLF = SimilarityLF(
                attrs=tuple(sec["attrs"]),
                pipeline=PipelineConfig(
                    preprocess=tuple(pipe.get("preprocess", [])),
                    tokenizer=pipe.get("tokenizer", "whitespace"),
                    weighting=pipe.get("weighting", "uniform"),
                    distance=pipe.get("distance", "jaccard"),
                ),
                match_if_sim_ge=sec.get("match_if_sim_ge"),
                unmatch_if_sim_le=sec.get("unmatch_if_sim_le"),
            )
        elif kind == "rule":
            sec = doc["rule"]
            body = RuleLF(
                extract_left=Extractor(
                    attrs=tuple(sec["extract_left"]["attrs"]),
                    pattern=sec["extract_left"]["pattern"],
                ),
                extract_right=Extractor(
                    attrs=tuple(sec["extract_right"]["attrs"]),
                    pattern=sec["extract_right"]["pattern"],
                ),
                comparator=sec["comparator"],
                when_true=int(sec["when_true"]),
                when_false=int(sec["when_false"]),
                when_missing=int(sec["when_missing"]),
            )
        else:
            raise SpecFormatError(f"unknown LF kind {kind!r}")
    except (KeyError, TypeError) as e:
        raise SpecFormatError(f"bad LF spec: missing or malformed field ({e})") from None
    return LabelFunctionSpec(name=str(name), origin=str(origin), body=body)


def validate(spec: LabelFunctionSpec, schema: list[str] | None = None) -> list[str]:
    """Collect every invariant violation as a human-readable message.

    An empty list means the spec is safe to evaluate. Unknown-attribute
    checks run only when a schema is supplied.
    """
    diags: list[str] = []
    if not spec.name or not re.match(r"^[A-Za-z_][A-Za-z0-9_.-]*$", spec.name):
        diags.append(f"bad LF name {spec.name!r}")
    if spec.origin not in ("user", "auto"):
        diags.append(f"origin must be 'user' or 'auto', got {spec.origin!r}")
    body = spec.body
    if isinstance(body, SimilarityLF):
        if not body.attrs:
            diags.append("similarity LF needs at least one attribute")
        diags.extend(body.pipeline.validate())
        t_hi, t_lo = body.match_if_sim_ge, body.unmatch_if_sim_le
        if t_hi is None and t_lo is None:
            diags.append("at least one of match_if_sim_ge / unmatch_if_sim_le required")
        for label, t in (("match_if_sim_ge", t_hi), ("unmatch_if_sim_le", t_lo)):
            if t is not None and not (0.0 <= t <= 1.0):
                diags.append(f"{label} must be in [0, 1], got {t}")
        if t_hi is not None and t_lo is not None and not (t_lo < t_hi):
            diags.append(f"t_lo < t_hi violated ({t_lo} >= {t_hi})")
        if schema is not None:
            for a in body.attrs:
                if a not in schema:
                    diags.append(f"unknown attribute {a!r}")
    elif isinstance(body, RuleLF):
        for side, ex in (("extract_left", body.extract_left),
                         ("extract_right", body.extract_right)):
            if not ex.attrs:
                diags.append(f"{side} needs at least one attribute")
            try:
                compiled = re.compile(ex.pattern)
            except re.error as e:
                diags.append(f"{side} pattern does not compile: {e}")
            else:
                if compiled.groups != 1:
                    diags.append(
                        f"{side} pattern must have exactly one capture group, "
                        f"has {compiled.groups}"
                    )
            if schema is not None:
                for a in ex.attrs:
                    if a not in schema:
                        diags.append(f"unknown attribute {a!r}")
        if not COMPARATOR_RE.match(body.comparator):
            diags.append(f"unknown comparator {body.comparator!r}")
        for label, v in (("when_true", body.when_true),
                         ("when_false", body.when_false),
                         ("when_missing", body.when_missing)):
            if v not in VOTE_VALUES:
                diags.append(f"{label} must be -1, 0 or +1, got {v}")
    else:
        diags.append(f"unknown LF body type {type(body).__name__}")
    return diags


def _rule_extract(ex: Extractor, tup) -> str | None:
    m = re.search(ex.pattern, tup.text(ex.attrs))
    return m.group(1) if m else None  # first match wins


def _rule_vote(body: RuleLF, left_tuple, right_tuple) -> int:
    lv = _rule_extract(body.extract_left, left_tuple)
    rv = _rule_extract(body.extract_right, right_tuple)
    if lv is None or rv is None:
        return body.when_missing
    cm = COMPARATOR_RE.match(body.comparator)
    kind = cm.group(1)
    if kind == "equal":
        hit = lv == rv
    elif kind == "not-equal":
        hit = lv != rv
    else:  # absolute-diff-gt(delta)
        delta = float(cm.group(2))
        try:
            hit = abs(float(lv) - float(rv)) > delta
        except ValueError:
            return body.when_missing  # non-numeric capture counts as missing
    return body.when_true if hit else body.when_false


class LFEvaluator:
    """Evaluates one spec over pairs, caching per-tuple pipeline work."""

    def __init__(self, spec: LabelFunctionSpec, tables: TablePair,
                 corpus_stats: CorpusStats | None = None):
        self.spec = spec
        self.tables = tables
        body = spec.body
        self._pipeline = None
        if isinstance(body, SimilarityLF):
            self._pipeline = TupleTextPipeline(body.pipeline, body.attrs, corpus_stats)

    def similarity(self, pair: CandidatePair) -> float | None:
        """The pipeline similarity for a similarity LF; None for rules."""
        if self._pipeline is None:
            return None
        lt = self.tables.left.get(pair.left_id)
        rt = self.tables.right.get(pair.right_id)
        return self._pipeline.similarity(lt, rt)

    def vote(self, pair: CandidatePair) -> int:
        body = self.spec.body
        lt = self.tables.left.get(pair.left_id)
        rt = self.tables.right.get(pair.right_id)
        if isinstance(body, SimilarityLF):
            sim = self._pipeline.similarity(lt, rt)
            if body.match_if_sim_ge is not None and sim >= body.match_if_sim_ge:
                return MATCH
            if body.unmatch_if_sim_le is not None and sim <= body.unmatch_if_sim_le:
                return NONMATCH
            return ABSTAIN
        return _rule_vote(body, lt, rt)


def evaluate(spec: LabelFunctionSpec, pair: CandidatePair, tables: TablePair,
             corpus_stats: CorpusStats | None = None) -> int:
    """Vote of one LF on one pair. Pure function of its inputs."""
    return LFEvaluator(spec, tables, corpus_stats).vote(pair)


def trace(spec: LabelFunctionSpec, pair: CandidatePair, tables: TablePair,
          corpus_stats: CorpusStats | None = None) -> dict:
    """Dry-run one LF on one pair, exposing intermediate values.

    Backs the authoring panel's step-through view: shows the texts both
    sides produce, the similarity or extracted captures, and the vote.
    """
    body = spec.body
    lt = tables.left.get(pair.left_id)
    rt = tables.right.get(pair.right_id)
    out: dict = {"lf": spec.name, "pair": [pair.left_id, pair.right_id]}
    if isinstance(body, SimilarityLF):
        out["left_text"] = lt.text(body.attrs)
        out["right_text"] = rt.text(body.attrs)
        ev = LFEvaluator(spec, tables, corpus_stats)
        out["similarity"] = ev.similarity(pair)
        out["vote"] = ev.vote(pair)
    else:
        out["left_text"] = lt.text(body.extract_left.attrs)
        out["right_text"] = rt.text(body.extract_right.attrs)
        out["left_capture"] = _rule_extract(body.extract_left, lt)
        out["right_capture"] = _rule_extract(body.extract_right, rt)
        out["vote"] = _rule_vote(body, lt, rt)
    return out


@dataclass
class LabelMatrix:
    """Votes of every LF on every candidate pair.

    Row i belongs to the i-th pair of the candidate list the matrix was
    built against; column j to lf_ids[j]. lf_version records the content
    hash each column was computed with, enabling incremental reuse.
    """

    lf_ids: list[str]
    votes: np.ndarray  # (n_pairs, n_lfs) int8 in {-1, 0, +1}
    lf_version: dict[str, str]

    @classmethod
    def empty(cls, n_pairs: int) -> "LabelMatrix":
        return cls(lf_ids=[], votes=np.zeros((n_pairs, 0), dtype=np.int8), lf_version={})

    def column(self, lf_id: str) -> np.ndarray:
        return self.votes[:, self.lf_ids.index(lf_id)]


def apply_all(
    specs: list[LabelFunctionSpec],
    candidates: list[CandidatePair],
    tables: TablePair,
    corpus_stats: CorpusStats | None = None,
    existing: LabelMatrix | None = None,
) -> tuple[LabelMatrix, int]:
    """Compute the label matrix, reusing unchanged columns.

    Columns whose stored hash equals the spec's current hash are copied
    verbatim from `existing`; new or edited specs are recomputed; specs
    no longer present are dropped. Returns (matrix, evaluations), where
    evaluations counts actual LF calls (zero on a full cache hit).
    Column order follows `specs`.
    """
    n = len(candidates)
    votes = np.zeros((n, len(specs)), dtype=np.int8)
    versions: dict[str, str] = {}
    evaluations = 0
    reusable = {}
    if existing is not None and existing.votes.shape[0] == n:
        reusable = {
            name: existing.votes[:, j]
            for j, name in enumerate(existing.lf_ids)
        }
    for j, spec in enumerate(specs):
        h = spec_hash(spec)
        versions[spec.name] = h
        cached = reusable.get(spec.name)
        if cached is not None and existing.lf_version.get(spec.name) == h:
            votes[:, j] = cached
            continue
        ev = LFEvaluator(spec, tables, corpus_stats)
        for i, pair in enumerate(candidates):
            votes[i, j] = ev.vote(pair)
            evaluations += 1
    return LabelMatrix(lf_ids=[s.name for s in specs], votes=votes,
                       lf_version=versions), evaluations


def lf_raw_stats(matrix: LabelMatrix) -> dict[str, dict]:
    """Per-LF vote counts and coverage (1 - abstain fraction)."""
    n = matrix.votes.shape[0]
    if n == 0:
        raise ValueError("empty label matrix")
    out = {}
    for j, name in enumerate(matrix.lf_ids):
        col = matrix.votes[:, j]
        n_match = int((col == MATCH).sum())
        n_unmatch = int((col == NONMATCH).sum())
        n_abstain = int((col == ABSTAIN).sum())
        out[name] = {
            "n_match": n_match,
            "n_unmatch": n_unmatch,
            "n_abstain": n_abstain,
            "coverage": 1.0 - n_abstain / n,
        }
    return out
