"""Weakly supervised entity-matching workbench.

Develop declarative labeling functions over blocked candidate pairs,
aggregate their noisy votes with an EM-trained class-conditional
labeling model under transitivity constraints, and iterate with
diagnostics (LF quality estimates, drilldowns, smart samples).
"""

from .autolf import AutoLFGrid, enumerate_configs, estimate_precision, generate
from .blocking import MinHashBlocker, block, build_signatures, smart_sample
from .labelmodel import (
    LFParameters,
    TransitiveLabelModel,
    e_step,
    fn_drilldown,
    fp_drilldown,
    lf_quality,
    m_step,
    transitivity_project,
)
from .lf import (
    LabelFunctionSpec,
    LabelMatrix,
    RuleLF,
    SimilarityLF,
    apply_all,
    evaluate,
    lf_raw_stats,
    parse_spec,
    serialize_spec,
    spec_hash,
    validate,
)
from .project import Project
from .tables import (
    ABSTAIN,
    MATCH,
    NONMATCH,
    CandidatePair,
    TablePair,
    Tuple,
    ingest_table_pair,
    pair_view,
)
from .textkit import CorpusStats, PipelineConfig, distance, preprocess, tokenize, weigh

__version__ = "0.1.0"

__all__ = [
    "ABSTAIN",
    "AutoLFGrid",
    "CandidatePair",
    "CorpusStats",
    "LFParameters",
    "LabelFunctionSpec",
    "LabelMatrix",
    "MATCH",
    "MinHashBlocker",
    "NONMATCH",
    "PipelineConfig",
    "Project",
    "RuleLF",
    "SimilarityLF",
    "TablePair",
    "TransitiveLabelModel",
    "Tuple",
    "apply_all",
    "block",
    "build_signatures",
    "distance",
    "e_step",
    "enumerate_configs",
    "estimate_precision",
    "evaluate",
    "fn_drilldown",
    "fp_drilldown",
    "generate",
    "ingest_table_pair",
    "lf_quality",
    "lf_raw_stats",
    "m_step",
    "pair_view",
    "parse_spec",
    "preprocess",
    "serialize_spec",
    "smart_sample",
    "spec_hash",
    "tokenize",
    "transitivity_project",
    "validate",
    "weigh",
]
