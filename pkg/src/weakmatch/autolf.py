"""Automatic generation of high-precision similarity LFs.

Enumerates pipeline configurations over a small grid, estimates each
configuration's precision at candidate thresholds using the
reference-table assumption (the left table has no duplicates, so a
right tuple matching several left tuples has at most one correct
match), and keeps a diverse, high-yield subset as ready-made LFs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lf import LabelFunctionSpec, SimilarityLF
from .tables import CandidatePair, TablePair
from .textkit import CorpusStats, PipelineConfig, TupleTextPipeline

# Default enumeration menu: 2 preprocess sets x 2 tokenizers x
# 2 weightings x 2 set distances = 16 configurations. Quadratic-cost
# edit distance is available in the menu type but kept out of the
# default grid.
DEFAULT_PREPROCESS_SETS = (
    ("lowercase",),
    ("lowercase", "strip-punctuation", "collapse-whitespace"),
)
DEFAULT_TOKENIZERS = ("whitespace", "qgram(3)")
DEFAULT_WEIGHTINGS = ("uniform", "tf-idf")
DEFAULT_DISTANCES = ("jaccard", "cosine")
DEFAULT_GRID_SIZE = 16

DEFAULT_THRESHOLD_GRID = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))  # 0.5 .. 0.95
DEFAULT_NOVELTY = 0.10


@dataclass(frozen=True)
class AutoLFGrid:
    """The four enumeration dimensions."""

    preprocess_sets: tuple[tuple[str, ...], ...] = DEFAULT_PREPROCESS_SETS
    tokenizers: tuple[str, ...] = DEFAULT_TOKENIZERS
    weightings: tuple[str, ...] = DEFAULT_WEIGHTINGS
    distances: tuple[str, ...] = DEFAULT_DISTANCES


@dataclass
class AutoLFCandidate:
    """One scored configuration: a pipeline plus its chosen threshold."""

    pipeline: PipelineConfig
    threshold: float
    est_precision: float
    est_match_count: int
    match_rows: frozenset[int] = field(default_factory=frozenset, repr=False)


def enumerate_configs(grid: AutoLFGrid) -> list[PipelineConfig]:
    """Cartesian product of the grid, with edit-distance deduplicated.

    Edit distance ignores tokenizer and weighting, so it contributes a
    single configuration per preprocess set.
    """
    for dim, values in (
        ("preprocess_sets", grid.preprocess_sets),
        ("tokenizers", grid.tokenizers),
        ("weightings", grid.weightings),
        ("distances", grid.distances),
    ):
        if not values:
            raise ValueError(f"empty grid dimension {dim!r}")
    configs = []
    for steps in grid.preprocess_sets:
        for dist in grid.distances:
            if dist == "edit-distance-normalized":
                configs.append(PipelineConfig(
                    preprocess=tuple(steps), tokenizer="whitespace",
                    weighting="uniform", distance=dist,
                ))
                continue
            for tok in grid.tokenizers:
                for w in grid.weightings:
                    configs.append(PipelineConfig(
                        preprocess=tuple(steps), tokenizer=tok,
                        weighting=w, distance=dist,
                    ))
    return configs


def pair_similarities(
    config: PipelineConfig,
    candidates: list[CandidatePair],
    tables: TablePair,
    corpus_stats: CorpusStats | None = None,
    attrs: tuple[str, ...] | None = None,
) -> np.ndarray:
    """Similarity of every candidate pair under one configuration.

    Work is linear in tuples, not pairs: each tuple's processed
    representation is computed once and reused.
    """
    attrs = tuple(attrs if attrs is not None else tables.schema)
    pipe = TupleTextPipeline(config, attrs, corpus_stats)
    sims = np.empty(len(candidates))
    for i, pair in enumerate(candidates):
        sims[i] = pipe.similarity(tables.left.get(pair.left_id),
                                  tables.right.get(pair.right_id))
    return sims


def estimate_precision(
    sims: np.ndarray,
    threshold: float,
    candidates: list[CandidatePair],
) -> tuple[float, int]:
    """Precision estimate for "similarity >= threshold is a match".

    With a duplicate-free reference (left) side, a right tuple matching
    d distinct left tuples has at most one correct match, so at most
    min(d, 1) of its d matched pairs can be right. The estimate is
    sum_r min(d(r), 1) / sum_r d(r), defined as 1.0 on an empty match
    set. Also returns the match count (recall proxy).
    """
    mask = sims >= threshold
    total = int(mask.sum())
    if total == 0:
        return 1.0, 0
    right_ids = {candidates[i].right_id for i in np.where(mask)[0]}
    return len(right_ids) / total, total


def score_config(
    config: PipelineConfig,
    sims: np.ndarray,
    candidates: list[CandidatePair],
    target_precision: float,
    threshold_grid: tuple[float, ...] = DEFAULT_THRESHOLD_GRID,
) -> AutoLFCandidate | None:
    """Choose the smallest threshold meeting the precision bar.

    Smaller thresholds admit weakly more matches, so the smallest
    qualifying threshold maximizes the match count under the bar.
    Returns None when no threshold on the grid qualifies or the
    qualifying match set is empty.
    """
    for t in sorted(threshold_grid):
        prec, count = estimate_precision(sims, t, candidates)
        if prec >= target_precision and count > 0:
            rows = frozenset(np.where(sims >= t)[0].tolist())
            return AutoLFCandidate(pipeline=config, threshold=t,
                                   est_precision=prec, est_match_count=count,
                                   match_rows=rows)
    return None


def _config_key(config: PipelineConfig) -> tuple:
    return (config.distance, config.tokenizer, config.weighting, config.preprocess)


def generate(
    candidates: list[CandidatePair],
    tables: TablePair,
    corpus_stats: CorpusStats | None = None,
    grid: AutoLFGrid | None = None,
    target_precision: float = 0.85,
    max_lfs: int = 5,
    threshold_grid: tuple[float, ...] = DEFAULT_THRESHOLD_GRID,
    novelty: float = DEFAULT_NOVELTY,
    attrs: tuple[str, ...] | None = None,
) -> list[LabelFunctionSpec]:
    """Produce ready-to-use match-voting LFs named auto_lf_0, auto_lf_1, ...

    Configurations are ranked by estimated match count; the greedy pass
    keeps one only if at least `novelty` of its match set is new
    relative to everything kept so far, up to max_lfs. Generated specs
    carry only a match threshold: voting non-match would need a
    separate non-match quality estimate.
    """
    if not (0.0 < target_precision <= 1.0):
        raise ValueError("target_precision must be in (0, 1]")
    if max_lfs < 1:
        raise ValueError("max_lfs must be >= 1")
    grid = grid or AutoLFGrid()
    attrs = tuple(attrs if attrs is not None else tables.schema)
    scored: list[AutoLFCandidate] = []
    for config in enumerate_configs(grid):
        sims = pair_similarities(config, candidates, tables, corpus_stats, attrs)
        cand = score_config(config, sims, candidates, target_precision, threshold_grid)
        if cand is not None:
            scored.append(cand)
    scored.sort(key=lambda c: (-c.est_match_count, _config_key(c.pipeline), c.threshold))

    kept: list[AutoLFCandidate] = []
    covered: set[int] = set()
    for cand in scored:
        if len(kept) >= max_lfs:
            break
        new_rows = cand.match_rows - covered
        if len(new_rows) < novelty * len(cand.match_rows):
            continue
        kept.append(cand)
        covered |= cand.match_rows

    return [
        LabelFunctionSpec(
            name=f"auto_lf_{i}",
            origin="auto",
            body=SimilarityLF(
                attrs=attrs,
                pipeline=cand.pipeline,
                match_if_sim_ge=cand.threshold,
                unmatch_if_sim_le=None,
            ),
        )
        for i, cand in enumerate(kept)
    ]
