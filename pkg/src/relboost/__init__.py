"""Boosted relational regression trees with human advice.

Learns an authorship target predicate over a publication knowledge graph
by functional gradient boosting of first-order regression trees, letting
Horn-clause advice reshape every gradient step. Ships a full pipeline:
record ingestion, fact extraction, corruption protocols, training,
ranking metrics, advice-weight sweeps, and model combination.
"""

from .advice import (
    AdviceRule,
    AdviceSet,
    coverage_report,
    default_advice,
    parse_advice,
    render_advice,
)
from .boosting import (
    BoostedRelationalClassifier,
    advice_gradient,
    data_gradient,
    train,
)
from .combine import (
    CombinedModel,
    clause_stats,
    combine,
    evaluate_combined,
    render_combined,
    top_clauses,
)
from .datasets import make_synthetic_dataset, make_synthetic_records
from .domain import authorship_modes, authorship_schema, authorship_target
from .errors import (
    ConfigError,
    DataError,
    ParseError,
    RelboostError,
    SchemaError,
    TrainingError,
)
from .experiments import compare_with_baseline, derive_seed, sweep_alpha
from .induction import (
    InductionParams,
    ModeDeclaration,
    default_modes,
    induce,
)
from .logic import (
    Atom,
    Constant,
    FactBase,
    HornClause,
    Label,
    LabeledExample,
    PredicateSignature,
    Schema,
    Variable,
    enumerate_bindings,
    satisfy,
)
from .metrics import ScoredExample, auc_pr, auc_roc, score_model
from .model import (
    BoostedModel,
    TrainingConfig,
    load_model,
    predict,
    save_model,
    sigmoid,
)
from .pipeline import (
    PublicationRecord,
    RelationalDataset,
    build_dataset,
    flip_labels,
    hide_labels,
    ingest,
    preprocess,
    sample_negatives,
)
from .tree import (
    DecisionList,
    RelationalRegressionTree,
    evaluate,
    evaluate_list,
    to_decision_list,
)

__version__ = "0.1.0"

__all__ = [
    "AdviceRule",
    "AdviceSet",
    "Atom",
    "BoostedModel",
    "BoostedRelationalClassifier",
    "CombinedModel",
    "ConfigError",
    "Constant",
    "DataError",
    "DecisionList",
    "FactBase",
    "HornClause",
    "InductionParams",
    "Label",
    "LabeledExample",
    "ModeDeclaration",
    "ParseError",
    "PredicateSignature",
    "PublicationRecord",
    "RelationalDataset",
    "RelationalRegressionTree",
    "RelboostError",
    "SchemaError",
    "Schema",
    "ScoredExample",
    "TrainingConfig",
    "TrainingError",
    "Variable",
    "advice_gradient",
    "auc_pr",
    "auc_roc",
    "authorship_modes",
    "authorship_schema",
    "authorship_target",
    "build_dataset",
    "clause_stats",
    "combine",
    "compare_with_baseline",
    "coverage_report",
    "data_gradient",
    "default_advice",
    "default_modes",
    "derive_seed",
    "enumerate_bindings",
    "evaluate",
    "evaluate_combined",
    "evaluate_list",
    "flip_labels",
    "hide_labels",
    "induce",
    "ingest",
    "load_model",
    "make_synthetic_dataset",
    "make_synthetic_records",
    "parse_advice",
    "predict",
    "preprocess",
    "render_advice",
    "render_combined",
    "sample_negatives",
    "satisfy",
    "save_model",
    "score_model",
    "sigmoid",
    "sweep_alpha",
    "to_decision_list",
    "top_clauses",
    "train",
]
