"""Shared domain vocabulary: identifiers, step records, metric triples, and router configuration.

All types here are immutable values; two instances with identical fields compare
equal and can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable

from .errors import InvalidRecord

ModelId = str
RoleId = str
ToolId = str

SCHEMA_VERSION = 1
DEFAULT_EMBEDDING_DIM = 384


class Phase(str, Enum):
    OPTIMIZATION = "optimization"
    INFERENCE = "inference"


class Facet(str, Enum):
    """The three retrieval facets whose union forms the candidate set."""

    AGENT = "agent"
    SEMANTIC = "semantic"
    TOOL = "tool"


ALL_FACETS = frozenset((Facet.AGENT, Facet.SEMANTIC, Facet.TOOL))


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-length real vector attached to an instruction for semantic retrieval."""

    values: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)

    @classmethod
    def of(cls, values: Iterable[float]) -> "EmbeddingVector":
        return cls(tuple(float(v) for v in values))


@dataclass(frozen=True)
class StepRecord:
    """One historical sub-task execution, persisted at step granularity.

    `task_performance` is the task-level score shared by every step of the
    trajectory; `step_success` is the binary outcome of this step alone.
    """

    record_id: str
    episode_id: str
    step_index: int
    role: RoleId
    model: ModelId
    instruction: str
    embedding: EmbeddingVector
    tools: frozenset[ToolId]
    cost: float
    duration: float
    step_success: int
    task_performance: float
    timestamp: datetime
    schema_version: int = SCHEMA_VERSION


@dataclass(frozen=True)
class MetricTriple:
    """Trajectory-level objectives: task score, USD spent, wall-clock seconds."""

    performance: float
    cost: float
    duration: float


@dataclass(frozen=True)
class TrilemmaWeights:
    """Scalarization coefficients of the sampled utility. w_p must be positive."""

    w_p: float = 1.0
    w_c: float = 0.1
    w_d: float = 0.05

    def __post_init__(self) -> None:
        for name, w in (("w_p", self.w_p), ("w_c", self.w_c), ("w_d", self.w_d)):
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"{name} must be a finite non-negative real, got {w}")
        if self.w_p == 0:
            raise ValueError("w_p must be > 0 (all-zero weighting is degenerate)")


@dataclass(frozen=True)
class RouterConfig:
    """Tunables of the routing pipeline.

    `facets` and `greedy` exist for ablations: masking facets narrows retrieval,
    and `greedy=True` replaces posterior sampling with an argmax over means.
    """

    theta_sim: float = 0.85
    weights: TrilemmaWeights = field(default_factory=TrilemmaWeights)
    variance_floor: float = 1e-6
    min_pseudo_count: float = 1.0
    fallback_model: ModelId | None = None
    explore_rate: float = 0.0
    phase: Phase = Phase.INFERENCE
    branch_factor: int = 3
    rng_seed: int = 0
    normalize_metrics: bool = False
    facets: frozenset[Facet] = ALL_FACETS
    greedy: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.theta_sim <= 1.0):
            raise ValueError(f"theta_sim must lie in (0, 1], got {self.theta_sim}")
        if not (0.0 <= self.explore_rate <= 1.0):
            raise ValueError(f"explore_rate must lie in [0, 1], got {self.explore_rate}")
        if self.branch_factor < 1:
            raise ValueError(f"branch_factor must be >= 1, got {self.branch_factor}")
        if self.variance_floor <= 0:
            raise ValueError("variance_floor must be positive")
        if self.min_pseudo_count <= 0:
            raise ValueError("min_pseudo_count must be positive")
        if not self.facets:
            raise ValueError("at least one retrieval facet must stay enabled")


def validate_record(record: StepRecord, dimension: int | None = None) -> StepRecord:
    """Return `record` unchanged iff every invariant holds, else raise InvalidRecord.

    `dimension` is the knowledge base's configured embedding dimension; pass None
    to skip the dimension check (e.g. before the store is known).
    """
    if not record.record_id:
        raise InvalidRecord("record_id is empty")
    if not record.episode_id:
        raise InvalidRecord("episode_id is empty")
    if record.step_index < 0:
        raise InvalidRecord("step_index is negative")
    if not record.role:
        raise InvalidRecord("role is empty")
    if not record.model:
        raise InvalidRecord("model is empty")
    if any(not t for t in record.tools):
        raise InvalidRecord("tools contains an empty id")
    if record.step_success not in (0, 1):
        raise InvalidRecord("step_success not in {0,1}")
    if not math.isfinite(record.cost) or record.cost < 0:
        raise InvalidRecord("cost must be finite and >= 0")
    if not math.isfinite(record.duration) or record.duration < 0:
        raise InvalidRecord("duration must be finite and >= 0")
    if not (0.0 <= record.task_performance <= 1.0):
        raise InvalidRecord("task_performance out of [0,1]")
    if dimension is not None and record.embedding.dimension != dimension:
        raise InvalidRecord(
            f"embedding dimension mismatch: got {record.embedding.dimension}, expected {dimension}"
        )
    if any(not math.isfinite(v) for v in record.embedding.values):
        raise InvalidRecord("embedding contains a non-finite value")
    if record.timestamp.tzinfo is None:
        raise InvalidRecord("timestamp must be timezone-aware (UTC)")
    return record


_RECORD_FIELDS = tuple(f.name for f in fields(StepRecord))


def encode_record(record: StepRecord) -> str:
    """Canonical one-line JSON encoding; key order is the field declaration order."""
    obj: dict[str, Any] = {
        "record_id": record.record_id,
        "episode_id": record.episode_id,
        "step_index": record.step_index,
        "role": record.role,
        "model": record.model,
        "instruction": record.instruction,
        "embedding": list(record.embedding.values),
        "tools": sorted(record.tools),
        "cost": record.cost,
        "duration": record.duration,
        "step_success": record.step_success,
        "task_performance": record.task_performance,
        "timestamp": record.timestamp.astimezone(timezone.utc).isoformat(),
        "schema_version": record.schema_version,
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def decode_record(line: str) -> StepRecord:
    """Parse one canonical JSON line. Raises ValueError/KeyError/TypeError on malformed input."""
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("record line is not a JSON object")
    missing = [k for k in _RECORD_FIELDS if k not in obj]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    return StepRecord(
        record_id=str(obj["record_id"]),
        episode_id=str(obj["episode_id"]),
        step_index=int(obj["step_index"]),
        role=str(obj["role"]),
        model=str(obj["model"]),
        instruction=str(obj["instruction"]),
        embedding=EmbeddingVector(tuple(float(v) for v in obj["embedding"])),
        tools=frozenset(str(t) for t in obj["tools"]),
        cost=float(obj["cost"]),
        duration=float(obj["duration"]),
        step_success=int(obj["step_success"]),
        task_performance=float(obj["task_performance"]),
        timestamp=datetime.fromisoformat(obj["timestamp"]),
        schema_version=int(obj["schema_version"]),
    )
