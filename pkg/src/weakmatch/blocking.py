"""Candidate pair generation via LSH over tuple signatures.

Default signatures are minhashes of the tuple's token set (all
attributes concatenated, lowercased, whitespace-tokenized) -- fully
self-contained. Externally computed embedding vectors can be imported
instead, in which case banding runs over random-hyperplane sign bits.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .tables import CandidatePair, TablePair

# Arithmetic for the seeded hash family (a*x + b) mod P stays exact in
# uint64 because x < P < 2^31, so products never exceed 2^62.
_PRIME = np.uint64((1 << 31) - 1)
_EMPTY_SENTINEL = np.uint64((1 << 31) - 1)

MODE_MINHASH = "builtin-minhash"
MODE_EMBEDDING = "imported-embedding"


class EmbeddingImportError(ValueError):
    """Raised when an embedding file does not cover the tables."""


@dataclass
class SignatureSet:
    """Per-tuple signature vectors for one side.

    matrix rows align with ids; source records how they were built.
    For imported embeddings, vectors holds the raw embedding rows used
    for cosine similarity hints.
    """

    ids: list[str]
    matrix: np.ndarray  # (n, k) uint64
    source: str
    vectors: np.ndarray | None = None


def tuple_tokens(tup, schema) -> set[str]:
    """Blocking token set: all attributes, lowercased, space-split."""
    return set(tup.text(tuple(schema)).lower().split())


def _token_base_hash(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % int(_PRIME)


class _MinHasher:
    """k seeded hash functions h_i(x) = (a_i x + b_i) mod P."""

    def __init__(self, num_hashes: int, seed: int):
        rng = np.random.default_rng(seed)
        self.a = rng.integers(1, int(_PRIME), size=num_hashes, dtype=np.uint64)
        self.b = rng.integers(0, int(_PRIME), size=num_hashes, dtype=np.uint64)
        self.num_hashes = num_hashes
        self._token_cache: dict[str, int] = {}

    def signature(self, tokens: set[str]) -> np.ndarray:
        if not tokens:
            return np.full(self.num_hashes, _EMPTY_SENTINEL, dtype=np.uint64)
        cache = self._token_cache
        base = np.fromiter(
            (cache.setdefault(t, _token_base_hash(t)) for t in tokens),
            dtype=np.uint64,
            count=len(tokens),
        )
        hashed = (self.a[:, None] * base[None, :] + self.b[:, None]) % _PRIME
        return hashed.min(axis=1)


def read_embeddings(path: str) -> dict[str, np.ndarray]:
    """Parse an id,v1,v2,... delimited file into id -> vector."""
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as f:
        for line_num, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise EmbeddingImportError(f"{path}: line {line_num}: no vector values")
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise EmbeddingImportError(
                    f"{path}: line {line_num}: non-numeric vector value"
                ) from None
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise EmbeddingImportError(
                    f"{path}: line {line_num}: dimension {vec.shape[0]} != {dim}"
                )
            vectors[parts[0]] = vec
    if not vectors:
        raise EmbeddingImportError(f"{path}: no vectors found")
    return vectors


def build_signatures(
    tables: TablePair,
    mode: str = MODE_MINHASH,
    num_hashes: int = 128,
    seed: int = 0,
    embedding_path: str | None = None,
) -> tuple[SignatureSet, SignatureSet]:
    """One signature per tuple on each side.

    builtin-minhash: k independent seeded hash functions over the token
    set. imported-embedding: sign bits of k seeded random hyperplane
    projections; missing ids or dimension drift raise.
    """
    if mode == MODE_MINHASH:
        hasher = _MinHasher(num_hashes, seed)
        sets = []
        for table in (tables.left, tables.right):
            ids = table.ids()
            mat = np.empty((len(ids), num_hashes), dtype=np.uint64)
            for i, t in enumerate(table.tuples):
                mat[i] = hasher.signature(tuple_tokens(t, tables.schema))
            sets.append(SignatureSet(ids=ids, matrix=mat, source=mode))
        return sets[0], sets[1]

    if mode == MODE_EMBEDDING:
        if embedding_path is None:
            raise EmbeddingImportError("imported-embedding mode needs a file path")
        vectors = read_embeddings(embedding_path)
        dim = next(iter(vectors.values())).shape[0]
        rng = np.random.default_rng(seed)
        planes = rng.standard_normal((num_hashes, dim))
        sets = []
        for table in (tables.left, tables.right):
            ids = table.ids()
            missing = [tid for tid in ids if tid not in vectors]
            if missing:
                raise EmbeddingImportError(
                    f"embedding file missing ids: {missing[:5]}"
                    + ("..." if len(missing) > 5 else "")
                )
            raw = np.stack([vectors[tid] for tid in ids])
            bits = (raw @ planes.T >= 0).astype(np.uint64)
            sets.append(SignatureSet(ids=ids, matrix=bits, source=mode, vectors=raw))
        return sets[0], sets[1]

    raise ValueError(f"unknown signature mode {mode!r}")


def _band_keys(matrix: np.ndarray, bands: int, rows: int) -> list[np.ndarray]:
    """Per band, one hashable key per tuple (contiguous row slices)."""
    keys = []
    for band in range(bands):
        chunk = np.ascontiguousarray(matrix[:, band * rows : (band + 1) * rows])
        keys.append(chunk.view(np.dtype((np.void, chunk.dtype.itemsize * rows)))[:, 0])
    return keys


def _pair_hints(left: SignatureSet, right: SignatureSet,
                li: np.ndarray, ri: np.ndarray) -> np.ndarray:
    if left.source == MODE_EMBEDDING:
        a = left.vectors[li]
        b = right.vectors[ri]
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        denom = np.where(na * nb == 0, 1.0, na * nb)
        cos = (a * b).sum(axis=1) / denom
        return np.clip(cos, 0.0, 1.0)
    return (left.matrix[li] == right.matrix[ri]).mean(axis=1)


def block(left: SignatureSet, right: SignatureSet, bands: int, rows: int) -> list[CandidatePair]:
    """Emit every left-right pair sharing at least one band bucket.

    Deduplicated; block_key names the first shared band bucket;
    similarity_hint is the fraction of equal signature coordinates
    (cosine similarity clamped to [0, 1] in embedding mode). Requires
    bands * rows == signature width.
    """
    k = left.matrix.shape[1]
    if bands * rows != k:
        raise ValueError(f"bands*rows must equal {k}, got {bands}*{rows}")
    left_keys = _band_keys(left.matrix, bands, rows)
    right_keys = _band_keys(right.matrix, bands, rows)
    found: dict[tuple[int, int], str] = {}
    for band in range(bands):
        buckets: dict[bytes, list[int]] = {}
        lk = left_keys[band]
        for i in range(len(left.ids)):
            buckets.setdefault(lk[i].tobytes(), []).append(i)
        rk = right_keys[band]
        for j in range(len(right.ids)):
            hits = buckets.get(rk[j].tobytes())
            if not hits:
                continue
            bucket_tag = f"band{band}:{rk[j].tobytes().hex()[:16]}"
            for i in hits:
                found.setdefault((i, j), bucket_tag)
    if not found:
        return []
    items = sorted(found.items(), key=lambda kv: (left.ids[kv[0][0]], right.ids[kv[0][1]]))
    li = np.array([i for (i, _), _ in items])
    ri = np.array([j for (_, j), _ in items])
    hints = _pair_hints(left, right, li, ri)
    return [
        CandidatePair(
            left_id=left.ids[i],
            right_id=right.ids[j],
            block_key=tag,
            similarity_hint=float(h),
        )
        for ((i, j), tag), h in zip(items, hints)
    ]


def smart_sample(
    candidates: list[CandidatePair],
    match_prob: dict[tuple[str, str], float],
    n: int,
    match_threshold: float = 0.5,
) -> list[tuple[CandidatePair, float]]:
    """Top-n likely matches the current model does not label match.

    Keeps pairs whose posterior is below the match threshold, ranked by
    blocking-time similarity_hint descending; ties break on
    (left_id, right_id) so repeated calls agree.
    """
    if match_prob is None:
        raise ValueError("run the labeling model first")
    if n < 1:
        raise ValueError("n must be >= 1")
    missed = [
        p for p in candidates
        if match_prob.get(p.key, 0.0) < match_threshold
    ]
    missed.sort(key=lambda p: (-p.similarity_hint, p.left_id, p.right_id))
    return [(p, p.similarity_hint) for p in missed[:n]]


def blocking_recall(candidates: list[CandidatePair],
                    true_matches: set[tuple[str, str]]) -> float | None:
    """Fraction of known true matches that survived blocking."""
    if not true_matches:
        return None
    keys = {p.key for p in candidates}
    return len(keys & true_matches) / len(true_matches)


class MinHashBlocker(BaseEstimator):
    """LSH blocker with a fit/transform surface.

    Parameters
    ----------
    num_hashes : int
        Signature width k; must equal bands * rows.
    bands, rows : int
        Banding layout. More bands at fixed k admits more candidates.
    seed : int
        Seeds the hash family (and hyperplanes in embedding mode), so
        candidate sets reproduce across runs.
    mode : str
        "builtin-minhash" or "imported-embedding".
    embedding_path : str or None
        Required in embedding mode: delimited id,v1,v2,... rows.
    """

    def __init__(self, num_hashes: int = 128, bands: int = 32, rows: int = 4,
                 seed: int = 0, mode: str = MODE_MINHASH,
                 embedding_path: str | None = None):
        self.num_hashes = num_hashes
        self.bands = bands
        self.rows = rows
        self.seed = seed
        self.mode = mode
        self.embedding_path = embedding_path

    def fit(self, tables: TablePair, y=None):
        if self.bands * self.rows != self.num_hashes:
            raise ValueError("num_hashes must equal bands * rows")
        self.left_signatures_, self.right_signatures_ = build_signatures(
            tables, mode=self.mode, num_hashes=self.num_hashes,
            seed=self.seed, embedding_path=self.embedding_path,
        )
        return self

    def transform(self, tables: TablePair = None) -> list[CandidatePair]:
        """Candidate pairs from the fitted signatures."""
        if not hasattr(self, "left_signatures_"):
            raise RuntimeError("blocker is not fitted")
        return block(self.left_signatures_, self.right_signatures_,
                     self.bands, self.rows)

    def fit_transform(self, tables: TablePair, y=None) -> list[CandidatePair]:
        return self.fit(tables).transform(tables)
