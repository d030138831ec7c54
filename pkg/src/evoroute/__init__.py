"""evoroute: experience-driven, step-granular model routing.

For each sub-task of an agentic workflow the router retrieves analogous past
executions from an append-only experience base, aggregates per-model
performance/cost/latency statistics, prunes to the Pareto-optimal models, and
picks one by Thompson sampling over Normal-Inverse-Gamma posteriors. Completed
trajectories feed back into the experience base, so the policy keeps
improving. A synthetic workflow simulator with planted ground truth makes the
whole loop verifiable offline.
"""

from .core import (
    EmbeddingVector,
    Facet,
    MetricTriple,
    ModelId,
    Phase,
    RoleId,
    RouterConfig,
    StepRecord,
    ToolId,
    TrilemmaWeights,
    validate_record,
)
from .embedding import HashingEmbedder, RemoteEmbedder, cosine_sim, make_embedder
from .experience_base import (
    ExperienceBase,
    KBSnapshot,
    query_by_role,
    query_by_tools,
    query_semantic,
)
from .pareto import TrilemmaProfile, aggregate_stats, dominates, pareto_filter
from .retrieval import (
    CandidateSet,
    KeywordTable,
    SubTaskContext,
    build_context,
    predict_tools,
    retrieve_candidates,
)
from .router import (
    ColdStartSummary,
    EpisodeBuffer,
    ModelPool,
    RoutingDecision,
    RoutingEngine,
    cold_start,
    complete_task,
    record_step,
    route,
    route_branched,
)
from .rng import make_rng
from .selector import NIGPosterior, SampledUtility, SelectionResult, fit_nig, sample_metric, select
from .simulator import (
    GeneratorConfig,
    SimEnvironment,
    SyntheticModelSpec,
    SyntheticTask,
    TrilemmaReport,
    evaluate,
    exec_step,
    gen_task,
    oracle_pareto,
    run_episode,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "ColdStartSummary",
    "EmbeddingVector",
    "EpisodeBuffer",
    "ExperienceBase",
    "Facet",
    "GeneratorConfig",
    "HashingEmbedder",
    "KBSnapshot",
    "KeywordTable",
    "MetricTriple",
    "ModelId",
    "ModelPool",
    "NIGPosterior",
    "Phase",
    "RemoteEmbedder",
    "RoleId",
    "RouterConfig",
    "RoutingDecision",
    "RoutingEngine",
    "SampledUtility",
    "SelectionResult",
    "SimEnvironment",
    "StepRecord",
    "SubTaskContext",
    "SyntheticModelSpec",
    "SyntheticTask",
    "ToolId",
    "TrilemmaProfile",
    "TrilemmaReport",
    "TrilemmaWeights",
    "aggregate_stats",
    "build_context",
    "cold_start",
    "complete_task",
    "cosine_sim",
    "dominates",
    "evaluate",
    "exec_step",
    "fit_nig",
    "gen_task",
    "make_embedder",
    "make_rng",
    "oracle_pareto",
    "pareto_filter",
    "predict_tools",
    "query_by_role",
    "query_by_tools",
    "query_semantic",
    "record_step",
    "retrieve_candidates",
    "route",
    "route_branched",
    "run_episode",
    "sample_metric",
    "select",
    "validate_record",
]
