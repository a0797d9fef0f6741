"""Project lifecycle and persistence.

One project per directory, flat versioned files, atomic-rename writes:

    config.json                project configuration
    tables/left.csv,right.csv  ingested tables (re-serialized)
    tables/meta.json           id column and aligned schema
    candidates/candidates.csv  blocked pair set
    lfs/<name>.lf              one LF spec per file, canonical format
    labels/ground_truth.csv    match/non-match labels with source
    model/matrix.npz           label matrix + per-column LF versions
    model/state.json           fitted parameters, posteriors, stats

Every mutation goes through this module; the HTTP service and the CLI
are both thin layers over it.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

from . import autolf
from .blocking import MinHashBlocker, blocking_recall, smart_sample
from .labelmodel import (
    AllAbstainError,
    LFParameters,
    NoPredictedMatchesError,
    TransitiveLabelModel,
    fn_drilldown,
    fp_drilldown,
    lf_quality,
    sample_predicted_matches,
)
from .lf import (
    LabelFunctionSpec,
    LabelMatrix,
    apply_all,
    lf_raw_stats,
    parse_spec,
    serialize_spec,
    spec_hash,
    trace,
    validate,
)
from .tables import (
    GT_MATCH,
    GT_NONMATCH,
    SOURCE_FIXTURE,
    SOURCE_USER,
    CandidatePair,
    GroundTruthStore,
    TablePair,
    ingest_table_pair,
    pair_view,
    write_table,
)
from .textkit import CorpusStats

STATE_FORMAT_VERSION = 1

DEFAULT_CONFIG = {
    "blocking": {
        "num_hashes": 120,
        "bands": 40,
        "rows": 3,
        "mode": "builtin-minhash",
        "embedding_path": None,
        "seed": 0,
    },
    "auto_lf": {
        "enabled": True,
        "target_precision": 0.85,
        "max_lfs": 5,
        "grid": None,
    },
    "model": {
        "max_iter": 100,
        "tol": 1e-6,
        "seed": 0,
        "project_transitivity": True,
    },
    "sampling": {
        "precision_sample_size": 10,
        "seed": 0,
    },
}


class ProjectError(ValueError):
    pass


class LFValidationError(ProjectError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


def atomic_write_text(path: str, text: str) -> None:
    _atomic_write(path, text.encode("utf-8"))


def _atomic_write(path: str, data: bytes) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def merge_config(overrides: dict | None) -> dict:
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    for section, values in (overrides or {}).items():
        if section not in config:
            raise ProjectError(f"unknown config section {section!r}")
        if not isinstance(values, dict):
            raise ProjectError(f"config section {section!r} must be an object")
        for key, value in values.items():
            if key not in config[section]:
                raise ProjectError(f"unknown config key {section}.{key}")
            config[section][key] = value
    return config


def _node_key(pair: CandidatePair) -> tuple[str, str]:
    # left and right ids live in separate namespaces
    return (f"L\x00{pair.left_id}", f"R\x00{pair.right_id}")


class Project:
    """All state of one matching task, backed by a directory."""

    def __init__(self, root: str):
        self.root = root
        self.config: dict = {}
        self.id_column: str = "id"
        self.tables: TablePair | None = None
        self.corpus_stats: CorpusStats | None = None
        self.candidates: list[CandidatePair] = []
        self.ground_truth = GroundTruthStore()
        self.lfs: dict[str, LabelFunctionSpec] = {}
        self.matrix: LabelMatrix | None = None
        self.params: LFParameters | None = None
        self.match_prior: float | None = None
        self.match_prob: np.ndarray | None = None
        self.loglik_path: list[float] = []
        self.fitted_lf_versions: dict[str, str] = {}
        self.precision_sample_size: int | None = None
        self._pair_index: dict[tuple[str, str], int] = {}

    # ------------------------------------------------------------------
    # lifecycle

    @classmethod
    def create(
        cls,
        root: str,
        left_path: str,
        right_path: str,
        id_column: str,
        config: dict | None = None,
        ground_truth_path: str | None = None,
    ) -> "Project":
        """Ingest, block, auto-generate LFs, fit once, persist."""
        if os.path.exists(os.path.join(root, "config.json")):
            raise ProjectError(f"project already exists at {root}")
        proj = cls(root)
        proj.config = merge_config(config)
        proj.id_column = id_column
        proj.tables = ingest_table_pair(left_path, right_path, id_column)
        proj.corpus_stats = CorpusStats.from_tables(proj.tables)

        bc = proj.config["blocking"]
        blocker = MinHashBlocker(
            num_hashes=bc["num_hashes"], bands=bc["bands"], rows=bc["rows"],
            seed=bc["seed"], mode=bc["mode"], embedding_path=bc["embedding_path"],
        )
        proj.candidates = blocker.fit_transform(proj.tables)
        proj._reindex()

        if ground_truth_path:
            proj._load_fixture_labels(ground_truth_path)

        ac = proj.config["auto_lf"]
        if ac["enabled"]:
            grid = autolf.AutoLFGrid(**ac["grid"]) if ac["grid"] else None
            for spec in autolf.generate(
                proj.candidates, proj.tables, proj.corpus_stats, grid=grid,
                target_precision=ac["target_precision"], max_lfs=ac["max_lfs"],
            ):
                proj.lfs[spec.name] = spec

        proj._persist_base()
        proj._persist_lfs()
        if proj.lfs:
            try:
                proj.apply_and_fit()
            except AllAbstainError:
                pass  # stats will report no usable LFs
        return proj

    @classmethod
    def load(cls, root: str) -> "Project":
        proj = cls(root)
        config_path = os.path.join(root, "config.json")
        if not os.path.exists(config_path):
            raise ProjectError(f"no project at {root}")
        with open(config_path, encoding="utf-8") as f:
            proj.config = merge_config(json.load(f).get("config"))
        with open(os.path.join(root, "tables", "meta.json"), encoding="utf-8") as f:
            meta = json.load(f)
        proj.id_column = meta["id_column"]
        proj.tables = ingest_table_pair(
            os.path.join(root, "tables", "left.csv"),
            os.path.join(root, "tables", "right.csv"),
            proj.id_column,
        )
        proj.corpus_stats = CorpusStats.from_tables(proj.tables)
        proj._load_candidates()
        proj._load_labels()
        proj._load_lfs()
        proj._load_model()
        return proj

    # ------------------------------------------------------------------
    # persistence helpers

    def _persist_base(self) -> None:
        atomic_write_text(
            os.path.join(self.root, "config.json"),
            json.dumps({"config": self.config}, indent=2) + "\n",
        )
        os.makedirs(os.path.join(self.root, "tables"), exist_ok=True)
        write_table(self.tables.left, os.path.join(self.root, "tables", "left.csv"),
                    self.id_column)
        write_table(self.tables.right, os.path.join(self.root, "tables", "right.csv"),
                    self.id_column)
        atomic_write_text(
            os.path.join(self.root, "tables", "meta.json"),
            json.dumps({"id_column": self.id_column, "schema": self.tables.schema}) + "\n",
        )
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["left_id", "right_id", "block_key", "similarity_hint"])
        for p in self.candidates:
            w.writerow([p.left_id, p.right_id, p.block_key, f"{p.similarity_hint:.9f}"])
        atomic_write_text(os.path.join(self.root, "candidates", "candidates.csv"),
                          buf.getvalue())
        self._persist_labels()

    def _persist_labels(self) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["left_id", "right_id", "value", "source"])
        for (lid, rid), (value, source) in sorted(self.ground_truth.items()):
            w.writerow([lid, rid, value, source])
        atomic_write_text(os.path.join(self.root, "labels", "ground_truth.csv"),
                          buf.getvalue())

    def _persist_lfs(self) -> None:
        lf_dir = os.path.join(self.root, "lfs")
        os.makedirs(lf_dir, exist_ok=True)
        existing = {f for f in os.listdir(lf_dir) if f.endswith(".lf")}
        for name, spec in self.lfs.items():
            atomic_write_text(os.path.join(lf_dir, f"{name}.lf"), serialize_spec(spec))
            existing.discard(f"{name}.lf")
        for stale in existing:
            os.unlink(os.path.join(lf_dir, stale))

    def _persist_model(self) -> None:
        model_dir = os.path.join(self.root, "model")
        os.makedirs(model_dir, exist_ok=True)
        if self.matrix is not None:
            buf = io.BytesIO()
            np.savez(
                buf,
                votes=self.matrix.votes,
                lf_ids=np.array(self.matrix.lf_ids, dtype=np.str_),
                hashes=np.array(
                    [self.matrix.lf_version[n] for n in self.matrix.lf_ids],
                    dtype=np.str_,
                ),
            )
            _atomic_write(os.path.join(model_dir, "matrix.npz"), buf.getvalue())
        state = {
            "format_version": STATE_FORMAT_VERSION,
            "params": self.params.to_dict() if self.params is not None else None,
            "match_prior": self.match_prior,
            "match_prob": self.match_prob.tolist() if self.match_prob is not None else None,
            "loglik_path": self.loglik_path,
            "fitted_lf_versions": self.fitted_lf_versions,
            "precision_sample_size": self.precision_sample_size,
        }
        atomic_write_text(os.path.join(model_dir, "state.json"),
                          json.dumps(state) + "\n")

    def _load_candidates(self) -> None:
        path = os.path.join(self.root, "candidates", "candidates.csv")
        self.candidates = []
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            for row in reader:
                self.candidates.append(CandidatePair(
                    left_id=row["left_id"], right_id=row["right_id"],
                    block_key=row["block_key"],
                    similarity_hint=float(row["similarity_hint"]),
                ))
        self._reindex()

    def _load_labels(self) -> None:
        path = os.path.join(self.root, "labels", "ground_truth.csv")
        self.ground_truth = GroundTruthStore()
        if not os.path.exists(path):
            return
        with open(path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                self.ground_truth.set((row["left_id"], row["right_id"]),
                                      row["value"], row["source"])

    def _load_lfs(self) -> None:
        lf_dir = os.path.join(self.root, "lfs")
        self.lfs = {}
        if not os.path.isdir(lf_dir):
            return
        for fname in sorted(os.listdir(lf_dir)):
            if not fname.endswith(".lf"):
                continue
            with open(os.path.join(lf_dir, fname), encoding="utf-8") as f:
                spec = parse_spec(f.read())
            self.lfs[spec.name] = spec

    def _load_model(self) -> None:
        matrix_path = os.path.join(self.root, "model", "matrix.npz")
        if os.path.exists(matrix_path):
            with np.load(matrix_path) as data:
                lf_ids = [str(x) for x in data["lf_ids"]]
                hashes = [str(x) for x in data["hashes"]]
                self.matrix = LabelMatrix(
                    lf_ids=lf_ids,
                    votes=data["votes"],
                    lf_version=dict(zip(lf_ids, hashes)),
                )
        state_path = os.path.join(self.root, "model", "state.json")
        if os.path.exists(state_path):
            with open(state_path, encoding="utf-8") as f:
                state = json.load(f)
            if state.get("format_version") != STATE_FORMAT_VERSION:
                raise ProjectError(
                    f"unsupported model state version {state.get('format_version')}"
                )
            if state["params"] is not None:
                self.params = LFParameters.from_dict(state["params"])
            self.match_prior = state["match_prior"]
            if state["match_prob"] is not None:
                self.match_prob = np.array(state["match_prob"], dtype=np.float64)
            self.loglik_path = state["loglik_path"]
            self.fitted_lf_versions = state["fitted_lf_versions"]
            self.precision_sample_size = state.get("precision_sample_size")

    def _load_fixture_labels(self, path: str) -> None:
        # fixture labels may cover pairs blocking missed; that is exactly
        # what blocking_recall reports, so keep them all
        with open(path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                key = (row["left_id"], row["right_id"])
                value = row.get("value", GT_MATCH)
                self.ground_truth.set(key, value, SOURCE_FIXTURE)

    def _reindex(self) -> None:
        self._pair_index = {p.key: i for i, p in enumerate(self.candidates)}

    # ------------------------------------------------------------------
    # LF store

    def upsert_lf(self, spec_or_text: LabelFunctionSpec | str) -> dict:
        spec = (parse_spec(spec_or_text) if isinstance(spec_or_text, str)
                else spec_or_text)
        diags = validate(spec, schema=self.tables.schema)
        if diags:
            raise LFValidationError(diags)
        self.lfs[spec.name] = spec
        self._persist_lfs()
        return {"name": spec.name, "version": spec_hash(spec)}

    def delete_lf(self, name: str) -> None:
        if name not in self.lfs:
            raise ProjectError(f"unknown LF {name!r}")
        del self.lfs[name]
        self._persist_lfs()

    def list_lfs(self) -> list[dict]:
        out = []
        for name in sorted(self.lfs):
            spec = self.lfs[name]
            out.append({
                "name": name,
                "origin": spec.origin,
                "version": spec_hash(spec),
                "text": serialize_spec(spec),
            })
        return out

    def trace_lf(self, spec_or_name: str, left_id: str, right_id: str) -> dict:
        """Dry-run one LF (by name, or as spec text) on one pair."""
        if spec_or_name in self.lfs:
            spec = self.lfs[spec_or_name]
        else:
            spec = parse_spec(spec_or_name)
            diags = validate(spec, schema=self.tables.schema)
            if diags:
                raise LFValidationError(diags)
        pair = self._require_pair(left_id, right_id)
        return trace(spec, pair, self.tables, self.corpus_stats)

    # ------------------------------------------------------------------
    # model pipeline

    def _ordered_specs(self) -> list[LabelFunctionSpec]:
        return [self.lfs[name] for name in sorted(self.lfs)]

    def _clamps(self) -> np.ndarray | None:
        if not len(self.ground_truth):
            return None
        clamps = np.full(len(self.candidates), np.nan)
        any_set = False
        for key, (value, _source) in self.ground_truth.items():
            idx = self._pair_index.get(key)
            if idx is not None:
                clamps[idx] = 1.0 if value == GT_MATCH else 0.0
                any_set = True
        return clamps if any_set else None

    def apply_and_fit(self) -> dict:
        """Incremental LF application followed by one model fit.

        Raises AllAbstainError (previous model state untouched) when no
        LF produces a single non-abstain vote.
        """
        specs = self._ordered_specs()
        if not specs:
            raise ProjectError("no LFs to apply")
        matrix, evaluations = apply_all(
            specs, self.candidates, self.tables, self.corpus_stats,
            existing=self.matrix,
        )
        mc = self.config["model"]
        model = TransitiveLabelModel(
            max_iter=mc["max_iter"], tol=mc["tol"], seed=mc["seed"],
            project_transitivity=mc["project_transitivity"],
        )
        model.fit(
            matrix.votes,
            pairs=[_node_key(p) for p in self.candidates],
            clamps=self._clamps(),
        )
        self.matrix = matrix
        self.params = model.params_
        self.match_prior = model.match_prior_
        self.match_prob = model.match_prob_
        self.loglik_path = model.loglik_path_
        self.fitted_lf_versions = dict(matrix.lf_version)
        self._persist_model()
        return {
            "stats": self.stats(),
            "lf_stats": self.lf_stats(),
            "lf_evaluations": evaluations,
            "iterations": model.n_iter_,
        }

    def is_fitted(self) -> bool:
        return self.match_prob is not None and self.matrix is not None

    def _require_fitted(self) -> None:
        if not self.is_fitted():
            raise ProjectError("model has not been fit; run apply first")

    def match_prob_by_key(self) -> dict[tuple[str, str], float]:
        self._require_fitted()
        return {p.key: float(g) for p, g in zip(self.candidates, self.match_prob)}

    # ------------------------------------------------------------------
    # stats payloads

    def stats(self) -> dict:
        matches_found = None
        if self.match_prob is not None:
            matches_found = int((self.match_prob >= 0.5).sum())
        est_precision, n_labels = self._estimated_precision()
        fixture_matches = {
            key for key, (value, source) in self.ground_truth.items()
            if value == GT_MATCH and source == SOURCE_FIXTURE
        }
        recall = blocking_recall(self.candidates, fixture_matches)
        no_usable_lfs = not self.lfs or (
            self.matrix is not None
            and self.matrix.votes.size > 0
            and not bool((self.matrix.votes != 0).any())
        )
        return {
            "left_size": len(self.tables.left),
            "right_size": len(self.tables.right),
            "candidate_count": len(self.candidates),
            "matches_found": matches_found,
            "estimated_precision": est_precision,
            "precision_label_count": n_labels,
            "blocking_recall": recall,
            "no_usable_lfs": no_usable_lfs,
        }

    def _precision_sample_indices(self) -> np.ndarray | None:
        if self.match_prob is None:
            return None
        n = self.precision_sample_size or self.config["sampling"]["precision_sample_size"]
        try:
            return sample_predicted_matches(
                self.match_prob, n, self.config["sampling"]["seed"],
            )
        except NoPredictedMatchesError:
            return None

    def _estimated_precision(self) -> tuple[float | None, int]:
        idx = self._precision_sample_indices()
        if idx is None:
            return None, 0
        n_match = 0
        n_labeled = 0
        for i in idx:
            got = self.ground_truth.get(self.candidates[i].key)
            if got is None or got[1] != SOURCE_USER:
                continue  # the estimate rests on human labels only
            n_labeled += 1
            n_match += got[0] == GT_MATCH
        if n_labeled == 0:
            return None, 0
        return n_match / n_labeled, n_labeled

    def lf_stats(self) -> list[dict]:
        self._require_fitted()
        raw = lf_raw_stats(self.matrix)
        fpr, fnr = lf_quality(self.matrix.votes, self.match_prob)
        out = []
        for j, name in enumerate(self.matrix.lf_ids):
            entry = {"name": name, "origin": self.lfs[name].origin if name in self.lfs else "?"}
            entry.update(raw[name])
            entry["est_fpr"] = float(fpr[j])
            entry["est_fnr"] = float(fnr[j])
            out.append(entry)
        return out

    # ------------------------------------------------------------------
    # samples, labels, drilldowns, export

    def _require_pair(self, left_id: str, right_id: str) -> CandidatePair:
        idx = self._pair_index.get((left_id, right_id))
        if idx is None:
            raise ProjectError(f"pair ({left_id}, {right_id}) is not a candidate")
        return self.candidates[idx]

    def _view_payload(self, pair: CandidatePair, **extra) -> dict:
        view = pair_view(pair, self.tables)
        got = self.ground_truth.get(pair.key)
        payload = {
            "left_id": pair.left_id,
            "right_id": pair.right_id,
            "schema": list(view.schema),
            "left": list(view.left_values),
            "right": list(view.right_values),
            "ground_truth": got[0] if got else None,
        }
        payload.update(extra)
        return payload

    def get_sample(self, kind: str, n: int) -> list[dict]:
        self._require_fitted()
        if kind == "smart":
            ranked = smart_sample(self.candidates, self.match_prob_by_key(), n)
            return [
                self._view_payload(pair, likelihood=likelihood)
                for pair, likelihood in ranked
            ]
        if kind == "precision":
            self.precision_sample_size = n
            self._persist_model()
            idx = self._precision_sample_indices()
            if idx is None:
                raise NoPredictedMatchesError("model currently predicts no matches")
            return [
                self._view_payload(self.candidates[i],
                                   match_prob=float(self.match_prob[i]))
                for i in idx
            ]
        raise ProjectError(f"unknown sample kind {kind!r}")

    def label_pair(self, left_id: str, right_id: str, value: str) -> dict:
        pair = self._require_pair(left_id, right_id)
        if value == "clear":
            self.ground_truth.clear(pair.key)
        elif value in (GT_MATCH, GT_NONMATCH):
            self.ground_truth.set(pair.key, value, SOURCE_USER)
        else:
            raise ProjectError(f"bad label value {value!r}")
        self._persist_labels()
        return self.stats()

    def drilldown(self, lf_name: str, kind: str) -> list[dict]:
        self._require_fitted()
        if lf_name not in self.matrix.lf_ids:
            raise ProjectError(f"unknown LF {lf_name!r}")
        col = self.matrix.column(lf_name)
        if kind == "fp":
            idx = fp_drilldown(col, self.match_prob)
        elif kind == "fn":
            idx = fn_drilldown(col, self.match_prob)
        else:
            raise ProjectError(f"unknown drilldown kind {kind!r}")
        return [
            self._view_payload(self.candidates[i],
                               match_prob=float(self.match_prob[i]),
                               vote=int(col[i]))
            for i in idx
        ]

    def export_matches(self) -> str:
        """Predicted matches as delimited text (left_id, right_id, prob)."""
        self._require_fitted()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["left_id", "right_id", "match_prob"])
        for i in np.where(self.match_prob >= 0.5)[0]:
            p = self.candidates[i]
            w.writerow([p.left_id, p.right_id, f"{self.match_prob[i]:.6f}"])
        return buf.getvalue()
