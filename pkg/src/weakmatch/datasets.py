"""Deterministic dataset generators for tests, demos and benchmarks.

make_product_tables builds a product-catalog matching task in the
spirit of e-commerce feeds: a duplicate-free reference catalog on the
left, noisy vendor listings on the right, and the planted pair set as
ground truth. The synthetic vote generators draw LF vote matrices from
the labeling model's own generative assumptions.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .labelmodel import LFParameters
from .tables import Table, TablePair, Tuple

_BRANDS = [
    "Sonava", "Klipvideo", "Braxton", "Nordline", "Vexa", "Altrix",
    "Pinnacle", "Quartzen", "Meridian", "Falkor", "Luminar", "Oswell",
    "Trivex", "Hartman", "Zephyra", "Calder", "Ironwood", "Bluepeak",
    "Veranda", "Mistral", "Orbita", "Kestrel", "Danfoss", "Ardent",
]

_TYPES = [
    ("lcd television", "screen hdmi remote wall mountable display panel"),
    ("bookshelf speaker", "audio stereo bass driver tweeter cabinet sound"),
    ("espresso machine", "coffee pump steam wand portafilter brew kitchen"),
    ("cordless drill", "battery torque chuck driver bits charger tool"),
    ("gaming laptop", "graphics processor memory storage keyboard backlit"),
    ("robot vacuum", "cleaning suction filter sensor docking carpet floor"),
    ("air purifier", "hepa filter quiet bedroom allergen coverage fan"),
    ("dslr camera", "lens sensor autofocus viewfinder megapixel photo"),
    ("electric kettle", "boil temperature steel cordless base litre water"),
    ("office chair", "ergonomic lumbar mesh adjustable armrest swivel seat"),
]

_ADJECTIVES = [
    "premium", "compact", "professional", "wireless", "portable",
    "digital", "classic", "advanced", "slim", "heavy", "duty", "smart",
]

# pseudo-word feature vocabulary; large enough that two random products
# almost never share feature tokens
_SYLLABLES = ["ba", "cor", "del", "fen", "gri", "hal", "jin", "kel", "lor",
              "mar", "nev", "pol", "qua", "rit", "sel", "tor", "ul", "vex",
              "wo", "zan"]
_FEATURES = [a + b for a in _SYLLABLES for b in _SYLLABLES]


def _model_code(rng: np.random.Generator) -> str:
    letters = "".join(rng.choice(list("ABCDEFGHKLMNPRSTVWX"), size=2))
    return f"{letters}{rng.integers(100, 9999)}"


def _compose_description(rng: np.random.Generator, brand: str, type_name: str,
                         adjs: list[str], boiler: list[str], features: list[str],
                         model: str | None) -> str:
    words = list(boiler) + list(features)
    rng.shuffle(words)
    parts = [brand.lower(), *adjs, type_name, *words]
    if model is not None:
        parts += ["model", model.lower()]
    return " ".join(parts)


def _left_product(rng: np.random.Generator, used_models: set[str]) -> dict:
    brand = _BRANDS[rng.integers(len(_BRANDS))]
    type_name, type_words = _TYPES[rng.integers(len(_TYPES))]
    while True:
        model = _model_code(rng)
        if model not in used_models:
            used_models.add(model)
            break
    size = int(rng.integers(10, 80))
    adjs = list(rng.choice(_ADJECTIVES, size=2, replace=False))
    boiler = list(rng.choice(type_words.split(), size=5, replace=False))
    features = list(rng.choice(_FEATURES, size=3, replace=False))
    name = f"{brand} {type_name} {model} {size}in"
    description = _compose_description(rng, brand, type_name, adjs, boiler,
                                       features, model)
    price = f"{rng.integers(20, 1500)}.{rng.integers(0, 100):02d}"
    return {
        "brand": brand, "type": type_name, "type_words": type_words,
        "model": model, "size": size, "adjs": adjs, "boiler": boiler,
        "features": features, "name": name, "description": description,
        "price": price,
    }


def _perturb_name(rng: np.random.Generator, prod: dict) -> str:
    brand, type_name, model, size = (
        prod["brand"], prod["type"], prod["model"], prod["size"],
    )
    variant = rng.integers(4)
    if variant == 0:
        return f"{brand} {model} {type_name} {size} inch"
    if variant == 1:
        return f"{brand} {type_name} {model}"
    if variant == 2:
        return f"{brand.upper()} {type_name} {model} {size}in"
    return f"{type_name} {model} {size}in by {brand}"


def _perturb_description(rng: np.random.Generator, description: str,
                         drop_prob: float) -> str:
    words = description.split()
    kept = [w for w in words if rng.random() > drop_prob]
    if not kept:
        kept = words[:1]
    return " ".join(kept)


def _typo(rng: np.random.Generator, word: str) -> str:
    if len(word) < 4:
        return word
    i = int(rng.integers(1, len(word) - 1))
    if rng.random() < 0.5:
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]  # swap
    return word[:i] + word[i + 1:]  # drop


def _add_typos(rng: np.random.Generator, text: str, word_prob: float) -> str:
    return " ".join(
        _typo(rng, w) if rng.random() < word_prob else w for w in text.split()
    )


def _reworded_description(rng: np.random.Generator, p: dict) -> str:
    """Vendor copy rewritten around the same identifiers: the rare
    tokens (model code, feature pseudo-words) survive, the common
    boilerplate is swapped, so only idf-aware pipelines stay confident."""
    other = [t for t in _TYPES if t[0] != p["type"]]
    _, foreign_words = other[rng.integers(len(other))]
    boiler = list(rng.choice(foreign_words.split(), size=4, replace=False))
    adjs = list(rng.choice(_ADJECTIVES, size=2, replace=False))
    return _compose_description(rng, p["brand"], p["type"], adjs, boiler,
                                p["features"], p["model"])


def _genericized(rng: np.random.Generator, p: dict) -> tuple[str, str]:
    """Listing with the technical identifiers stripped: no model code,
    no feature codes, boilerplate intact. Only plain token overlap can
    still see the match; idf-aware pipelines lose their anchors."""
    name = f"{p['brand']} {p['type']} {p['size']}in"
    desc = _compose_description(rng, p["brand"], p["type"], p["adjs"],
                                p["boiler"], [], None)
    return name, desc


def make_product_tables(
    n_left: int = 200,
    n_right: int = 200,
    match_fraction: float = 0.85,
    exact_copy_fraction: float = 0.10,
    typo_fraction: float = 0.16,
    typo_word_prob: float = 0.5,
    heavy_drop_fraction: float = 0.12,
    reword_fraction: float = 0.14,
    genericized_fraction: float = 0.12,
    description_drop_prob: float = 0.18,
    seed: int = 7,
) -> tuple[TablePair, set[tuple[str, str]]]:
    """Product-catalog matching fixture with planted ground truth.

    The left table is a duplicate-free reference catalog. Most right
    tuples are noisy copies of distinct left products; noise comes in
    flavors (exact copies, token drops and reorders, in-word typos,
    aggressive boilerplate drops) so that different similarity
    pipelines genuinely disagree about which pairs clear a threshold.
    The remaining right tuples are fresh products from the same
    brand/type families, realistic blocking distractors. Returns the
    table pair and the set of true (left_id, right_id) matches.
    """
    rng = np.random.default_rng(seed)
    used_models: set[str] = set()
    products = [_left_product(rng, used_models) for _ in range(n_left)]

    schema = ["name", "description", "price"]
    left_tuples = [
        Tuple(id=f"L{i:04d}", attributes={
            "name": p["name"], "description": p["description"], "price": p["price"],
        })
        for i, p in enumerate(products)
    ]

    n_matches = min(int(round(match_fraction * n_right)), n_left)
    matched_idx = rng.choice(n_left, size=n_matches, replace=False)
    right_tuples = []
    truth: set[tuple[str, str]] = set()
    cut_exact = exact_copy_fraction
    cut_typo = cut_exact + typo_fraction
    cut_heavy = cut_typo + heavy_drop_fraction
    cut_reword = cut_heavy + reword_fraction
    cut_generic = cut_reword + genericized_fraction
    for j, i in enumerate(matched_idx):
        p = products[i]
        rid = f"R{j:04d}"
        u = rng.random()
        price = p["price"] if rng.random() < 0.7 else f"{float(p['price']) + rng.integers(1, 20):.2f}"
        if u < cut_exact:
            name, desc, price = p["name"], p["description"], p["price"]
        elif u < cut_typo:
            name = _add_typos(rng, _perturb_name(rng, p), typo_word_prob)
            desc = _add_typos(
                rng, _perturb_description(rng, p["description"], 0.05), typo_word_prob)
        elif u < cut_heavy:
            name = _perturb_name(rng, p)
            desc = _perturb_description(rng, p["description"], 0.5)
        elif u < cut_reword:
            name = _perturb_name(rng, p)
            desc = _reworded_description(rng, p)
        elif u < cut_generic:
            name, desc = _genericized(rng, p)
        else:
            name = _perturb_name(rng, p)
            desc = _perturb_description(rng, p["description"], description_drop_prob)
        right_tuples.append(Tuple(id=rid, attributes={
            "name": name, "description": desc, "price": price,
        }))
        truth.add((f"L{i:04d}", rid))
    for j in range(n_matches, n_right):
        p = _left_product(rng, used_models)
        right_tuples.append(Tuple(id=f"R{j:04d}", attributes={
            "name": _perturb_name(rng, p),
            "description": _perturb_description(rng, p["description"], description_drop_prob),
            "price": p["price"],
        }))

    tables = TablePair(
        left=Table(schema, left_tuples),
        right=Table(schema, right_tuples),
        schema=schema,
    )
    return tables, truth


def write_fixture_csvs(
    out_dir: str,
    tables: TablePair,
    truth: set[tuple[str, str]] | None = None,
    id_column: str = "id",
) -> dict[str, str]:
    """Write left.csv / right.csv (and ground_truth.csv) under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for side, table in (("left", tables.left), ("right", tables.right)):
        path = os.path.join(out_dir, f"{side}.csv")
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow([id_column] + table.schema)
            for t in table.tuples:
                w.writerow([t.id] + [t.attributes.get(c, "") for c in table.schema])
        paths[side] = path
    if truth is not None:
        path = os.path.join(out_dir, "ground_truth.csv")
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["left_id", "right_id", "value"])
            for lid, rid in sorted(truth):
                w.writerow([lid, rid, "match"])
        paths["ground_truth"] = path
    return paths


def make_planted_params(
    n_lfs: int,
    acc_range: tuple[float, float] = (0.6, 0.95),
    wrong_frac_range: tuple[float, float] = (0.3, 0.9),
    seed: int = 0,
) -> LFParameters:
    """Random class-conditional vote distributions for synthetic votes.

    Accuracies (P(+1|match), P(-1|non-match)) are uniform on acc_range;
    the leftover mass splits between the wrong vote and abstention.
    Low-accuracy LFs casting mostly wrong (rather than abstaining)
    votes is what separates accuracy-weighted aggregation from plain
    majority voting.
    """
    rng = np.random.default_rng(seed)
    acc_m = rng.uniform(*acc_range, size=n_lfs)
    acc_u = rng.uniform(*acc_range, size=n_lfs)
    wrong_m = (1.0 - acc_m) * rng.uniform(*wrong_frac_range, size=n_lfs)
    wrong_u = (1.0 - acc_u) * rng.uniform(*wrong_frac_range, size=n_lfs)
    return LFParameters(
        pos_given_match=acc_m,
        neg_given_match=wrong_m,
        pos_given_nonmatch=wrong_u,
        neg_given_nonmatch=acc_u,
    )


def sample_votes(
    params: LFParameters,
    y: np.ndarray,
    seed: int = 0,
) -> np.ndarray:
    """Draw a vote matrix from class-conditional categoricals."""
    rng = np.random.default_rng(seed)
    n, j = y.shape[0], params.n_lfs
    u = rng.random((n, j))
    p_pos = np.where(y[:, None] == 1, params.pos_given_match, params.pos_given_nonmatch)
    p_neg = np.where(y[:, None] == 1, params.neg_given_match, params.neg_given_nonmatch)
    votes = np.zeros((n, j), dtype=np.int8)
    votes[u < p_pos] = 1
    votes[(u >= p_pos) & (u < p_pos + p_neg)] = -1
    return votes


def make_synthetic_votes(
    n_pairs: int = 5000,
    n_lfs: int = 10,
    match_prior: float = 0.1,
    acc_range: tuple[float, float] = (0.6, 0.95),
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, LFParameters]:
    """Votes drawn from the labeling model's own generative story.

    Returns (votes, y, planted_params) with y in {0, 1}; pair rows are
    independent, so there is no pair graph and nothing to project.
    """
    rng = np.random.default_rng(seed)
    y = (rng.random(n_pairs) < match_prior).astype(np.int64)
    params = make_planted_params(n_lfs, acc_range=acc_range, seed=seed + 1)
    votes = sample_votes(params, y, seed=seed + 2)
    return votes, y, params


def make_transitive_instance(
    n_clusters: int = 40,
    n_noise_pairs: int = 300,
    n_lfs: int = 6,
    acc: float = 0.82,
    seed: int = 0,
) -> tuple[list[tuple[str, str]], np.ndarray, np.ndarray]:
    """Clustered pairs where transitivity carries real signal.

    Every cluster is a triangle of records referring to one entity; one
    edge per cluster gets no votes at all (a coverage gap), so only the
    transitive structure can recover it. Noise pairs connect records
    from different clusters. Returns (pairs, votes, y).
    """
    rng = np.random.default_rng(seed)
    pairs: list[tuple[str, str]] = []
    y: list[int] = []
    masked: list[int] = []
    for c in range(n_clusters):
        a, b, d = f"n{c}a", f"n{c}b", f"n{c}c"
        gap = rng.integers(3)
        for k, (u, v) in enumerate(((a, b), (a, d), (b, d))):
            pairs.append((u, v))
            y.append(1)
            if k == gap:
                masked.append(len(pairs) - 1)
    cross = [
        (f"n{c1}{m1}", f"n{c2}{m2}")
        for c1 in range(n_clusters) for c2 in range(c1 + 1, n_clusters)
        for m1 in "abc" for m2 in "abc"
    ]
    n_noise = min(n_noise_pairs, len(cross))
    for idx in rng.choice(len(cross), size=n_noise, replace=False):
        pairs.append(cross[idx])
        y.append(0)
    y_arr = np.array(y, dtype=np.int64)
    params = LFParameters(
        pos_given_match=np.full(n_lfs, acc),
        neg_given_match=np.full(n_lfs, 0.05),
        pos_given_nonmatch=np.full(n_lfs, 0.03),
        neg_given_nonmatch=np.full(n_lfs, acc),
    )
    votes = sample_votes(params, y_arr, seed=seed + 1)
    votes[masked, :] = 0
    return pairs, votes, y_arr
