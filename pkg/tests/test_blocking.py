import numpy as np
import pytest

from weakmatch.blocking import (
    EmbeddingImportError,
    MinHashBlocker,
    _MinHasher,
    block,
    blocking_recall,
    build_signatures,
    read_embeddings,
    smart_sample,
    tuple_tokens,
)
from weakmatch.tables import CandidatePair, Table, TablePair, Tuple


def token_tables(left_tokens, right_tokens):
    """One-attribute tables whose tuples carry the given token sets."""
    def table(sets, prefix):
        return Table(["text"], [
            Tuple(id=f"{prefix}{i}", attributes={"text": " ".join(sorted(toks))})
            for i, toks in enumerate(sets)
        ])
    return TablePair(left=table(left_tokens, "L"), right=table(right_tokens, "R"),
                     schema=["text"])


def jaccard_pair(rng, shared, only_a, only_b, tag):
    """Two token sets with exact Jaccard shared/(shared+only_a+only_b)."""
    pool = [f"{tag}_{i}" for i in range(shared + only_a + only_b)]
    rng.shuffle(pool)
    common = pool[:shared]
    a = set(common) | set(pool[shared:shared + only_a])
    b = set(common) | set(pool[shared + only_a:])
    return a, b


class TestSignatures:
    def test_identical_tuples_identical_minhash(self):
        tables = token_tables([{"a", "b", "c"}], [{"a", "b", "c"}])
        left, right = build_signatures(tables, num_hashes=64, seed=1)
        assert np.array_equal(left.matrix[0], right.matrix[0])

    def test_deterministic_across_runs(self):
        tables = token_tables([{"x", "y"}], [{"y", "z"}])
        a = build_signatures(tables, num_hashes=32, seed=5)
        b = build_signatures(tables, num_hashes=32, seed=5)
        assert np.array_equal(a[0].matrix, b[0].matrix)
        assert np.array_equal(a[1].matrix, b[1].matrix)

    def test_disjoint_sets_rarely_collide(self):
        tables = token_tables([{f"a{i}" for i in range(30)}],
                              [{f"b{i}" for i in range(30)}])
        left, right = build_signatures(tables, num_hashes=512, seed=2)
        agreement = (left.matrix[0] == right.matrix[0]).mean()
        assert agreement <= 0.02

    def test_coordinate_agreement_estimates_jaccard(self):
        # classical property: P(coordinate equal) = Jaccard similarity
        rng = np.random.default_rng(11)
        hasher = _MinHasher(512, seed=3)
        for s, (shared, extra) in {0.5: (50, 25), 0.8: (80, 10)}.items():
            a, b = jaccard_pair(rng, shared, extra, extra, tag=f"j{s}")
            sig_a = hasher.signature(a)
            sig_b = hasher.signature(b)
            agreement = (sig_a == sig_b).mean()
            assert abs(agreement - s) <= 0.05


class TestBlock:
    def test_identical_tables_keep_diagonal(self):
        sets = [{f"t{i}", f"u{i}", f"v{i}"} for i in range(10)]
        tables = token_tables(sets, sets)
        left, right = build_signatures(tables, num_hashes=64, seed=0)
        pairs = block(left, right, bands=16, rows=4)
        keys = {p.key for p in pairs}
        assert all((f"L{i}", f"R{i}") in keys for i in range(10))

    def test_bad_band_layout_rejected(self):
        tables = token_tables([{"a"}], [{"a"}])
        left, right = build_signatures(tables, num_hashes=64, seed=0)
        with pytest.raises(ValueError, match="bands"):
            block(left, right, bands=10, rows=10)

    def test_similarity_hint_is_coordinate_agreement(self):
        tables = token_tables([{"a", "b", "c", "d"}], [{"a", "b", "c", "e"}])
        left, right = build_signatures(tables, num_hashes=128, seed=0)
        pairs = block(left, right, bands=128, rows=1)
        assert len(pairs) == 1
        expected = (left.matrix[0] == right.matrix[0]).mean()
        assert pairs[0].similarity_hint == pytest.approx(expected)

    def test_single_row_bands_superset_coarser_bandings(self):
        rng = np.random.default_rng(21)
        sets_l, sets_r = [], []
        for i in range(40):
            a, b = jaccard_pair(rng, rng.integers(5, 40), 10, 10, tag=f"p{i}")
            sets_l.append(a)
            sets_r.append(b)
        tables = token_tables(sets_l, sets_r)
        left, right = build_signatures(tables, num_hashes=64, seed=4)
        finest = {p.key for p in block(left, right, bands=64, rows=1)}
        for bands, rows in ((32, 2), (16, 4), (8, 8)):
            coarser = {p.key for p in block(left, right, bands=bands, rows=rows)}
            assert coarser <= finest

    def test_candidates_grow_with_bands_at_fixed_k(self):
        rng = np.random.default_rng(22)
        sets_l, sets_r = [], []
        for i in range(40):
            a, b = jaccard_pair(rng, rng.integers(5, 40), 10, 10, tag=f"q{i}")
            sets_l.append(a)
            sets_r.append(b)
        tables = token_tables(sets_l, sets_r)
        left, right = build_signatures(tables, num_hashes=64, seed=4)
        sizes = {}
        previous = None
        for bands, rows in ((8, 8), (16, 4), (32, 2), (64, 1)):
            # nested band boundaries: finer bandings admit weakly more pairs
            current = {p.key for p in block(left, right, bands=bands, rows=rows)}
            sizes[bands] = len(current)
            if previous is not None:
                assert previous <= current
            previous = current

    def test_empirical_rate_matches_banding_formula(self):
        # light version of the acceptance run: s=0.8, b=16, r=4, k=64
        rng = np.random.default_rng(33)
        n = 300
        sets_l, sets_r = [], []
        for i in range(n):
            a, b = jaccard_pair(rng, 80, 10, 10, tag=f"mc{i}")
            sets_l.append(a)
            sets_r.append(b)
        tables = token_tables(sets_l, sets_r)
        left, right = build_signatures(tables, num_hashes=64, seed=6)
        keys = {p.key for p in block(left, right, bands=16, rows=4)}
        rate = sum((f"L{i}", f"R{i}") in keys for i in range(n)) / n
        expected = 1 - (1 - 0.8 ** 4) ** 16
        assert abs(rate - expected) <= 0.07


class TestSmartSample:
    def pairs(self):
        return [
            CandidatePair("L1", "R1", similarity_hint=0.9),
            CandidatePair("L2", "R2", similarity_hint=0.2),
            CandidatePair("L3", "R3", similarity_hint=0.7),
            CandidatePair("L4", "R4", similarity_hint=0.7),
        ]

    def test_all_matched_gives_empty(self):
        probs = {("L1", "R1"): 0.9, ("L2", "R2"): 0.8,
                 ("L3", "R3"): 0.99, ("L4", "R4"): 0.51}
        assert smart_sample(self.pairs(), probs, n=5) == []

    def test_sorted_by_hint_descending(self):
        probs = {p.key: 0.1 for p in self.pairs()}
        ranked = smart_sample(self.pairs(), probs, n=2)
        assert [r[1] for r in ranked] == [0.9, 0.7]

    def test_tie_break_lexicographic(self):
        probs = {p.key: 0.0 for p in self.pairs()}
        ranked = smart_sample(self.pairs(), probs, n=4)
        assert [r[0].left_id for r in ranked] == ["L1", "L3", "L4", "L2"]

    def test_never_returns_predicted_match(self):
        rng = np.random.default_rng(8)
        pairs = [CandidatePair(f"L{i}", f"R{i}", similarity_hint=float(rng.random()))
                 for i in range(50)]
        probs = {p.key: float(rng.random()) for p in pairs}
        ranked = smart_sample(pairs, probs, n=50)
        assert all(probs[p.key] < 0.5 for p, _ in ranked)

    def test_matches_filter_sort_oracle(self):
        rng = np.random.default_rng(9)
        pairs = [CandidatePair(f"L{i}", f"R{i}", similarity_hint=float(rng.choice([0.1, 0.5, 0.9])))
                 for i in range(30)]
        probs = {p.key: float(rng.random()) for p in pairs}
        got = [p.key for p, _ in smart_sample(pairs, probs, n=30)]
        want = [p.key for p in sorted(
            (p for p in pairs if probs[p.key] < 0.5),
            key=lambda p: (-p.similarity_hint, p.left_id, p.right_id))]
        assert got == want

    def test_posterior_required(self):
        with pytest.raises(ValueError, match="labeling model"):
            smart_sample(self.pairs(), None, n=1)


class TestEmbeddingMode:
    def write_embeddings(self, path, rows):
        with open(path, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(",".join(str(x) for x in row) + "\n")

    def test_import_and_block(self, tmp_path):
        tables = token_tables([{"a"}, {"b"}], [{"c"}, {"d"}])
        path = tmp_path / "vecs.csv"
        self.write_embeddings(path, [
            ["L0", 1.0, 0.0], ["L1", 0.0, 1.0],
            ["R0", 1.0, 0.05], ["R1", -1.0, 0.0],
        ])
        left, right = build_signatures(tables, mode="imported-embedding",
                                       num_hashes=32, seed=0,
                                       embedding_path=str(path))
        pairs = block(left, right, bands=32, rows=1)
        keys = {p.key for p in pairs}
        assert ("L0", "R0") in keys
        hint = {p.key: p.similarity_hint for p in pairs}
        assert hint[("L0", "R0")] == pytest.approx(
            1.0 / np.sqrt(1 + 0.05**2), abs=1e-9)
        # opposite vectors never share a sign bit, and cosine clamps to 0
        assert ("L0", "R1") not in keys or hint[("L0", "R1")] == 0.0

    def test_missing_id_rejected(self, tmp_path):
        tables = token_tables([{"a"}], [{"b"}])
        path = tmp_path / "vecs.csv"
        self.write_embeddings(path, [["L0", 1.0, 0.0]])
        with pytest.raises(EmbeddingImportError, match="missing ids"):
            build_signatures(tables, mode="imported-embedding",
                             num_hashes=8, embedding_path=str(path))

    def test_dimension_mismatch_rejected(self, tmp_path):
        path = tmp_path / "vecs.csv"
        self.write_embeddings(path, [["L0", 1.0, 2.0], ["R0", 1.0]])
        with pytest.raises(EmbeddingImportError, match="dimension"):
            read_embeddings(str(path))

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "vecs.csv"
        self.write_embeddings(path, [["L0", "abc"]])
        with pytest.raises(EmbeddingImportError, match="non-numeric"):
            read_embeddings(str(path))


class TestBlockingRecall:
    def test_recall_fraction(self):
        candidates = [CandidatePair("L1", "R1"), CandidatePair("L2", "R9")]
        truth = {("L1", "R1"), ("L2", "R2")}
        assert blocking_recall(candidates, truth) == 0.5

    def test_none_without_truth(self):
        assert blocking_recall([CandidatePair("L1", "R1")], set()) is None


class TestBlockerEstimator:
    def test_fit_transform_reproducible(self):
        sets = [{f"w{i}", f"x{i}"} for i in range(8)]
        tables = token_tables(sets, sets)
        one = MinHashBlocker(num_hashes=32, bands=8, rows=4, seed=7).fit_transform(tables)
        two = MinHashBlocker(num_hashes=32, bands=8, rows=4, seed=7).fit_transform(tables)
        assert [(p.key, p.similarity_hint) for p in one] == \
            [(p.key, p.similarity_hint) for p in two]

    def test_get_params(self):
        blocker = MinHashBlocker(num_hashes=64, bands=16, rows=4, seed=3)
        params = blocker.get_params()
        assert params["bands"] == 16 and params["seed"] == 3

    def test_inconsistent_layout_rejected(self):
        tables = token_tables([{"a"}], [{"a"}])
        with pytest.raises(ValueError):
            MinHashBlocker(num_hashes=64, bands=3, rows=4).fit(tables)

    def test_unfitted_transform_rejected(self):
        with pytest.raises(RuntimeError):
            MinHashBlocker().transform(None)

    def test_tuple_tokens_lowercased_all_attrs(self, tv_tables):
        tokens = tuple_tokens(tv_tables.left.get("L1"), tv_tables.schema)
        assert "sony" in tokens and "Sony" not in tokens
        assert "49.00" in tokens
