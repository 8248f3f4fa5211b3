"""Fairness elicitation and auditing for binary risk predictions over tabular cases.

The package covers the full loop: describe cases with a typed feature schema,
audit a model's predictions for group-fairness gaps, walk stakeholders through
a staged elicitation protocol, aggregate their judgments, and fit a scoring
model constrained by what they said.
"""

from .analysis import (
    BordaResult,
    CriterionSupport,
    PairConsensus,
    ResponseMatrix,
    borda_aggregate,
    consensus_summary,
    consistency_score,
    criterion_support,
    matrix_from_sessions,
    mean_consistency,
)
from .data import (
    Case,
    Dataset,
    FeatureDef,
    FeatureSchema,
    binarize,
    generate_synthetic,
    load_dataset,
    load_dataset_json,
    save_dataset_csv,
    save_dataset_json,
)
from .elicitation import (
    GroupFairnessResponse,
    PairwiseResponse,
    ParticipantProfile,
    Session,
    export_session,
    import_session,
    next_question,
    record_exploration,
    record_response,
    replay_session,
    start_session,
)
from .errors import FairlicitError
from .metrics import (
    AwarenessConfig,
    FairnessReport,
    GroupViewSummary,
    SubgroupStats,
    fairness_report,
    group_view_summary,
    subgroup_stats,
)
from .similarity import (
    CaseEncoder,
    SimilarityRanking,
    nearest_discordant_pairs,
    rank_by_similarity,
    weighted_distance,
)
from .training import (
    ConstrainedLogistic,
    ConstrainedModel,
    PairConstraint,
    TrainingConfig,
    TrainingReport,
    derive_constraints,
    equal_constraint,
    evaluate,
    strict_constraint,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "AwarenessConfig",
    "BordaResult",
    "Case",
    "CaseEncoder",
    "ConstrainedLogistic",
    "ConstrainedModel",
    "CriterionSupport",
    "Dataset",
    "FairlicitError",
    "FairnessReport",
    "FeatureDef",
    "FeatureSchema",
    "GroupFairnessResponse",
    "GroupViewSummary",
    "PairConsensus",
    "PairConstraint",
    "PairwiseResponse",
    "ParticipantProfile",
    "ResponseMatrix",
    "Session",
    "SimilarityRanking",
    "SubgroupStats",
    "TrainingConfig",
    "TrainingReport",
    "binarize",
    "borda_aggregate",
    "consensus_summary",
    "consistency_score",
    "criterion_support",
    "derive_constraints",
    "equal_constraint",
    "evaluate",
    "export_session",
    "fairness_report",
    "generate_synthetic",
    "group_view_summary",
    "import_session",
    "load_dataset",
    "load_dataset_json",
    "matrix_from_sessions",
    "mean_consistency",
    "nearest_discordant_pairs",
    "next_question",
    "rank_by_similarity",
    "record_exploration",
    "record_response",
    "replay_session",
    "save_dataset_csv",
    "save_dataset_json",
    "start_session",
    "strict_constraint",
    "subgroup_stats",
    "train",
    "weighted_distance",
]
