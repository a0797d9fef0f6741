import numpy as np
import pytest

from weakmatch.autolf import (
    AutoLFGrid,
    DEFAULT_GRID_SIZE,
    enumerate_configs,
    estimate_precision,
    generate,
    pair_similarities,
    score_config,
)
from weakmatch.blocking import MinHashBlocker
from weakmatch.datasets import make_product_tables
from weakmatch.lf import validate
from weakmatch.tables import CandidatePair
from weakmatch.textkit import CorpusStats, PipelineConfig


class TestEnumerate:
    def test_default_grid_size_matches_documented_count(self):
        assert len(enumerate_configs(AutoLFGrid())) == DEFAULT_GRID_SIZE == 16

    def test_product_of_dimensions(self):
        grid = AutoLFGrid(
            preprocess_sets=(("lowercase",), ("lowercase", "stem")),
            tokenizers=("whitespace", "qgram(3)"),
            weightings=("uniform", "tf-idf"),
            distances=("jaccard", "overlap-coefficient"),
        )
        assert len(enumerate_configs(grid)) == 16

    def test_edit_distance_collapses_variants(self):
        grid = AutoLFGrid(
            preprocess_sets=(("lowercase",), ()),
            tokenizers=("whitespace", "qgram(3)"),
            weightings=("uniform", "tf-idf"),
            distances=("edit-distance-normalized",),
        )
        configs = enumerate_configs(grid)
        assert len(configs) == 2  # one per preprocess set

    def test_empty_dimension_rejected(self):
        with pytest.raises(ValueError, match="empty grid dimension"):
            enumerate_configs(AutoLFGrid(tokenizers=()))


def pairs_of(*keys):
    return [CandidatePair(l, r) for l, r in keys]


class TestEstimatePrecision:
    def test_one_to_one_matching_is_precise(self):
        candidates = pairs_of(("L1", "R1"), ("L2", "R2"), ("L3", "R3"))
        sims = np.array([0.9, 0.8, 0.7])
        est, count = estimate_precision(sims, 0.5, candidates)
        assert est == 1.0 and count == 3

    def test_double_match_halves_precision(self):
        candidates = pairs_of(("L1", "R1"), ("L2", "R1"))
        est, count = estimate_precision(np.array([0.9, 0.9]), 0.5, candidates)
        assert est == 0.5 and count == 2

    def test_empty_match_set_defined_as_one(self):
        candidates = pairs_of(("L1", "R1"))
        est, count = estimate_precision(np.array([0.3]), 0.5, candidates)
        assert est == 1.0 and count == 0

    def test_match_count_nonincreasing_in_threshold(self):
        rng = np.random.default_rng(0)
        candidates = pairs_of(*((f"L{i}", f"R{i % 7}") for i in range(60)))
        sims = rng.uniform(0, 1, 60)
        counts = [estimate_precision(sims, t, candidates)[1]
                  for t in np.linspace(0, 1, 21)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_underestimates_on_planted_one_to_one(self):
        # every right tuple has exactly one true left match (highest sim);
        # injected noise pairs rank strictly below their true pair
        rng = np.random.default_rng(4)
        candidates = []
        sims = []
        truth = set()
        for i in range(40):
            candidates.append(CandidatePair(f"L{i}", f"R{i}"))
            sims.append(rng.uniform(0.6, 1.0))
            truth.add((f"L{i}", f"R{i}"))
            for _ in range(rng.integers(0, 3)):
                j = int(rng.integers(0, 40))
                if j != i:
                    candidates.append(CandidatePair(f"L{j}", f"R{i}"))
                    sims.append(rng.uniform(0.0, 0.55))
        sims = np.array(sims)
        for t in (0.3, 0.5, 0.7):
            est, count = estimate_precision(sims, t, candidates)
            if count == 0:
                continue
            kept = [c.key for c, s in zip(candidates, sims) if s >= t]
            true_precision = sum(k in truth for k in kept) / len(kept)
            assert est <= true_precision + 0.05


class TestScoreConfig:
    def test_smallest_qualifying_threshold_chosen(self):
        candidates = pairs_of(("L1", "R1"), ("L2", "R2"), ("L1", "R2"))
        sims = np.array([0.9, 0.7, 0.55])  # the wrong pair drops first
        cand = score_config(PipelineConfig(), sims, candidates, target_precision=0.9)
        assert cand.threshold == 0.6
        assert cand.est_match_count == 2

    def test_none_when_bar_unreachable(self):
        # every right tuple matches two lefts at every threshold
        candidates = pairs_of(("L1", "R1"), ("L2", "R1"))
        sims = np.array([0.99, 0.99])
        assert score_config(PipelineConfig(), sims, candidates, 0.9) is None


@pytest.fixture(scope="module")
def fixture_task():
    tables, truth = make_product_tables(seed=7)
    corpus = CorpusStats.from_tables(tables)
    candidates = MinHashBlocker(num_hashes=120, bands=40, rows=3,
                                seed=0).fit_transform(tables)
    return tables, truth, corpus, candidates


class TestGenerate:
    def test_fixture_estimates_track_true_precision(self, fixture_task):
        tables, truth, corpus, candidates = fixture_task
        config = PipelineConfig(preprocess=("lowercase",), tokenizer="whitespace",
                                weighting="uniform", distance="jaccard")
        sims = pair_similarities(config, candidates, tables, corpus)
        for t in (0.5, 0.7, 0.9):
            est, count = estimate_precision(sims, t, candidates)
            assert count > 0
            kept = [c.key for c, s in zip(candidates, sims) if s >= t]
            true_precision = sum(k in truth for k in kept) / len(kept)
            assert abs(est - true_precision) <= 0.1

    def test_generated_specs_validate_and_are_named(self, fixture_task):
        tables, _, corpus, candidates = fixture_task
        specs = generate(candidates, tables, corpus)
        assert specs, "fixture should yield at least one auto LF"
        for i, spec in enumerate(specs):
            assert spec.name == f"auto_lf_{i}"
            assert spec.origin == "auto"
            assert spec.body.unmatch_if_sim_le is None
            assert validate(spec, schema=tables.schema) == []

    def test_unreachable_precision_gives_empty(self):
        # every right tuple ties two textually identical left tuples, so
        # no threshold can beat precision 1/2
        from tests.conftest import make_pair
        tables = make_pair(
            [("L1", {"name": "acme gadget"}), ("L2", {"name": "acme gadget"})],
            [("R1", {"name": "acme gadget"})],
            ["name"],
        )
        corpus = CorpusStats.from_tables(tables)
        candidates = pairs_of(("L1", "R1"), ("L2", "R1"))
        specs = generate(candidates, tables, corpus, target_precision=0.9)
        assert specs == []

    def test_identical_match_sets_keep_one(self, fixture_task):
        # grid variants that agree on every candidate produce one LF
        tables, _, corpus, candidates = fixture_task
        grid = AutoLFGrid(
            preprocess_sets=(("lowercase",), ("lowercase", "collapse-whitespace")),
            tokenizers=("whitespace",),
            weightings=("uniform",),
            distances=("jaccard",),
        )
        specs = generate(candidates, tables, corpus, grid=grid, target_precision=0.85)
        assert len(specs) == 1

    def test_bad_arguments(self, fixture_task):
        tables, _, corpus, candidates = fixture_task
        with pytest.raises(ValueError):
            generate(candidates, tables, corpus, target_precision=0.0)
        with pytest.raises(ValueError):
            generate(candidates, tables, corpus, max_lfs=0)
