"""The routing loop: retrieve, aggregate, filter, select — then buffer step
outcomes and commit the finished trajectory back to the knowledge base.

Routing never fails: an empty candidate set (or one whose models are all
outside the pool) falls back to the configured model or a uniform draw.
Records buffer until the task-level performance is known, because every step
record embeds the shared task score; streaming commits would require mutation.

Dual-phase operation: the inference phase routes a single optimized path; the
optimization phase branches each step into the pipeline's choice plus uniform
alternates so the knowledge base accumulates diverse model evidence.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Callable, Iterable, Iterator, Protocol

from .core import (
    EmbeddingVector,
    ModelId,
    Phase,
    RoleId,
    RouterConfig,
    StepRecord,
    ToolId,
)
from .embedding import Embedder, HashingEmbedder
from .errors import (
    DuplicateStepOutcome,
    IncompleteBuffer,
    InvalidConfig,
    InvalidPerformance,
    UnknownDecision,
    WrongPhase,
)
from .experience_base import ExperienceBase, KBSnapshot
from .pareto import aggregate_stats, pareto_filter
from .retrieval import (
    DEFAULT_KEYWORDS,
    CandidateSet,
    KeywordTable,
    SubTaskContext,
    ToolPredictor,
    build_context,
    retrieve_candidates,
)
from .rng import RandomSource, make_rng
from .selector import SampledUtility, select


@dataclass(frozen=True)
class ModelPrice:
    """USD per million tokens, split by direction."""

    input_per_m: float
    output_per_m: float

    def __post_init__(self) -> None:
        if self.input_per_m < 0 or self.output_per_m < 0:
            raise InvalidConfig("model prices must be >= 0")


@dataclass(frozen=True)
class ModelPool:
    """Ordered, unique model ids with price metadata."""

    models: tuple[ModelId, ...]
    prices: dict[ModelId, ModelPrice]

    def __post_init__(self) -> None:
        if not self.models:
            raise InvalidConfig("model pool must be non-empty")
        if len(set(self.models)) != len(self.models):
            raise InvalidConfig("model pool has duplicate names")
        missing = [m for m in self.models if m not in self.prices]
        if missing:
            raise InvalidConfig(f"pool models missing prices: {missing}")

    def __len__(self) -> int:
        return len(self.models)

    def __contains__(self, model: ModelId) -> bool:
        return model in self.prices and model in self.models

    @classmethod
    def of(cls, entries: Iterable[tuple[ModelId, float, float]]) -> "ModelPool":
        names = []
        prices = {}
        for name, inp, outp in entries:
            names.append(name)
            prices[name] = ModelPrice(inp, outp)
        return cls(models=tuple(names), prices=prices)


@dataclass(frozen=True)
class RoutingDecision:
    """Selected model plus everything needed to audit the choice."""

    decision_id: str
    model: ModelId
    phase: Phase
    candidate_count: int
    pareto_models: tuple[ModelId, ...]
    sampled_utilities: tuple[SampledUtility, ...]
    fallback_used: bool
    seed_used: int
    explored: bool = False
    branch_index: int = 0
    predicted_tools: frozenset[ToolId] = frozenset()

    def diagnostics(self) -> dict:
        """Deterministic view (excludes the unique decision_id)."""
        return {
            "model": self.model,
            "phase": self.phase.value,
            "candidate_count": self.candidate_count,
            "pareto_models": list(self.pareto_models),
            "sampled_utilities": [
                {
                    "model": u.model,
                    "x_p": u.x_p,
                    "x_c": u.x_c,
                    "x_d": u.x_d,
                    "utility": u.utility,
                }
                for u in self.sampled_utilities
            ],
            "fallback_used": self.fallback_used,
            "explored": self.explored,
            "branch_index": self.branch_index,
            "seed_used": self.seed_used,
        }


def _new_decision_id() -> str:
    # unique per call, never derived from request content
    return uuid.uuid4().hex


def route(
    ctx: SubTaskContext,
    snapshot: KBSnapshot,
    pool: ModelPool,
    config: RouterConfig,
    rng: RandomSource,
    table: KeywordTable = DEFAULT_KEYWORDS,
    fallback: ToolPredictor | None = None,
) -> RoutingDecision:
    """One routing decision. Always returns a model from the pool.

    RNG draw order (fixed, for replayability): selection draws for the
    pipeline path first, then — only when explore_rate > 0 on the pipeline
    path — one uniform variate for the exploration check and, if it fires and
    unobserved pool models exist, one index draw over them. The fallback path
    consumes a single index draw when no fallback model is configured.
    """
    cand = retrieve_candidates(ctx, snapshot, config, table, fallback)
    in_pool = tuple(r for r in cand.records if r.model in pool)

    if not in_pool:
        if config.fallback_model is not None and config.fallback_model in pool:
            model = config.fallback_model
        else:
            model = pool.models[int(rng.integers(len(pool)))]
        return RoutingDecision(
            decision_id=_new_decision_id(),
            model=model,
            phase=config.phase,
            candidate_count=len(cand),
            pareto_models=(),
            sampled_utilities=(),
            fallback_used=True,
            seed_used=config.rng_seed,
            predicted_tools=cand.predicted_tools,
        )

    usable = CandidateSet(
        records=in_pool, facet_tags=cand.facet_tags, predicted_tools=cand.predicted_tools
    )
    profiles = pareto_filter(aggregate_stats(usable))
    result = select(profiles, config.weights, rng, config)
    model = result.model
    explored = False
    if config.explore_rate > 0.0:
        u = float(rng.random())
        if u < config.explore_rate:
            unobserved = sorted(set(pool.models) - usable.models())
            if unobserved:
                model = unobserved[int(rng.integers(len(unobserved)))]
                explored = True
    return RoutingDecision(
        decision_id=_new_decision_id(),
        model=model,
        phase=config.phase,
        candidate_count=len(cand),
        pareto_models=tuple(p.model for p in profiles),
        sampled_utilities=result.utilities,
        fallback_used=False,
        seed_used=config.rng_seed,
        explored=explored,
        predicted_tools=cand.predicted_tools,
    )


def route_branched(
    ctx: SubTaskContext,
    snapshot: KBSnapshot,
    pool: ModelPool,
    config: RouterConfig,
    rng: RandomSource,
    table: KeywordTable = DEFAULT_KEYWORDS,
    fallback: ToolPredictor | None = None,
) -> list[RoutingDecision]:
    """Optimization-phase branching: the pipeline's choice plus distinct uniform
    alternates from the rest of the pool (fewer branches when the pool is small)."""
    if config.phase != Phase.OPTIMIZATION:
        raise WrongPhase(f"route_branched requires the optimization phase, got {config.phase.value}")
    primary = route(ctx, snapshot, pool, config, rng, table, fallback)
    decisions = [primary]
    remaining = [m for m in pool.models if m != primary.model]
    k = min(config.branch_factor - 1, len(remaining))
    if k > 0:
        order = rng.permutation(len(remaining))
        for b, idx in enumerate(order[:k], start=1):
            decisions.append(
                replace(
                    primary,
                    decision_id=_new_decision_id(),
                    model=remaining[int(idx)],
                    explored=True,
                    branch_index=b,
                )
            )
    return decisions


@dataclass
class PendingStep:
    decision_id: str
    ctx: SubTaskContext
    model: ModelId
    tools: frozenset[ToolId]
    timestamp: datetime
    cost: float | None = None
    duration: float | None = None
    step_success: int | None = None

    @property
    def recorded(self) -> bool:
        return self.step_success is not None


@dataclass
class EpisodeBuffer:
    """Steps of one in-flight episode, awaiting the task outcome."""

    episode_id: str
    steps: list[PendingStep] = field(default_factory=list)

    def add(
        self,
        decision: RoutingDecision,
        ctx: SubTaskContext,
        tools: frozenset[ToolId] | None = None,
        timestamp: datetime | None = None,
    ) -> None:
        if ctx.episode_id != self.episode_id:
            raise InvalidConfig(
                f"context episode {ctx.episode_id!r} != buffer episode {self.episode_id!r}"
            )
        if any(s.decision_id == decision.decision_id for s in self.steps):
            raise DuplicateStepOutcome(f"decision {decision.decision_id} already buffered")
        if self.steps and ctx.step_index <= self.steps[-1].ctx.step_index:
            raise InvalidConfig("steps must be added in increasing step_index order")
        self.steps.append(
            PendingStep(
                decision_id=decision.decision_id,
                ctx=ctx,
                model=decision.model,
                tools=tools if tools is not None else decision.predicted_tools,
                timestamp=timestamp or datetime.now(timezone.utc),
            )
        )

    def find(self, decision_id: str) -> PendingStep:
        for s in self.steps:
            if s.decision_id == decision_id:
                return s
        raise UnknownDecision(decision_id)


def record_step(
    buffer: EpisodeBuffer,
    decision_id: str,
    cost: float,
    duration: float,
    step_success: int,
) -> EpisodeBuffer:
    """Attach one step outcome. The first recording wins; duplicates are rejected."""
    step = buffer.find(decision_id)
    if step.recorded:
        raise DuplicateStepOutcome(decision_id)
    if step_success not in (0, 1):
        raise InvalidPerformance(f"step_success must be 0 or 1, got {step_success}")
    if cost < 0 or duration < 0:
        raise InvalidPerformance("cost and duration must be >= 0")
    step.cost = float(cost)
    step.duration = float(duration)
    step.step_success = int(step_success)
    return buffer


def complete_task(
    buffer: EpisodeBuffer,
    task_performance: float,
    kb: ExperienceBase,
    embedder: Embedder | None = None,
) -> int:
    """Stamp every buffered step with the task score and commit atomically.

    Returns the knowledge base's new generation. The buffer is cleared only
    after the commit succeeds. `embedder` is consulted only if a context is
    missing its embedding (normally computed at route time).
    """
    if not (0.0 <= task_performance <= 1.0):
        raise InvalidPerformance(f"task_performance out of [0,1]: {task_performance}")
    missing = [s.decision_id for s in buffer.steps if not s.recorded]
    if missing:
        raise IncompleteBuffer(missing)
    records = []
    for i, step in enumerate(buffer.steps):
        emb = step.ctx.embedding
        if emb is None:  # defensive: contexts normally embed at route time
            if embedder is None:
                embedder = HashingEmbedder(kb.dimension)
            emb = embedder.embed(step.ctx.instruction)
        records.append(
            StepRecord(
                record_id=f"{buffer.episode_id}/{i:04d}",
                episode_id=buffer.episode_id,
                step_index=i,
                role=step.ctx.role,
                model=step.model,
                instruction=step.ctx.instruction,
                embedding=emb,
                tools=step.tools,
                cost=step.cost,
                duration=step.duration,
                step_success=step.step_success,
                task_performance=float(task_performance),
                timestamp=step.timestamp,
            )
        )
    generation = kb.append_trajectory(records)
    buffer.steps.clear()
    return generation


class TaskStep(Protocol):
    role: RoleId
    instruction: str
    required_tools: frozenset[ToolId]


class EpisodeEnvironment(Protocol):
    """What the cold-start loop needs from an execution environment."""

    def exec_step(self, model: ModelId, step, rng: RandomSource) -> tuple[int, float, float]: ...

    def score(self, task, successes: list[int]) -> float: ...


@dataclass(frozen=True)
class ColdStartSummary:
    tasks_run: int
    records_added: int
    total_cost: float
    total_duration: float


def cold_start(
    task_source: Iterator,
    n_tasks: int,
    pool: ModelPool,
    kb: ExperienceBase,
    rng: RandomSource,
    env: EpisodeEnvironment,
    embedder: Embedder | None = None,
    clock: Callable[[float], datetime] | None = None,
) -> ColdStartSummary:
    """Populate an empty (or growing) knowledge base by running `n_tasks`
    episodes with the model drawn uniformly from the pool at every step."""
    if n_tasks < 1:
        raise InvalidConfig("cold_start requires n_tasks >= 1")
    if embedder is None:
        embedder = HashingEmbedder(kb.dimension)
    records_added = 0
    total_cost = 0.0
    total_duration = 0.0
    elapsed = 0.0
    for _ in range(n_tasks):
        task = next(task_source)
        buffer = EpisodeBuffer(episode_id=task.task_id)
        successes: list[int] = []
        for idx, step in enumerate(task.steps):
            model = pool.models[int(rng.integers(len(pool)))]
            ctx = build_context(step.role, step.instruction, embedder, task.task_id, idx)
            decision = RoutingDecision(
                decision_id=_new_decision_id(),
                model=model,
                phase=Phase.OPTIMIZATION,
                candidate_count=0,
                pareto_models=(),
                sampled_utilities=(),
                fallback_used=True,
                seed_used=0,
            )
            ts = clock(elapsed) if clock is not None else None
            buffer.add(decision, ctx, tools=step.required_tools, timestamp=ts)
            success, cost, duration = env.exec_step(model, step, rng)
            record_step(buffer, decision.decision_id, cost, duration, success)
            successes.append(success)
            total_cost += cost
            total_duration += duration
            elapsed += duration
        complete_task(buffer, env.score(task, successes), kb, embedder)
        records_added += len(task.steps)
    return ColdStartSummary(
        tasks_run=n_tasks,
        records_added=records_added,
        total_cost=total_cost,
        total_duration=total_duration,
    )


class RoutingEngine:
    """Stateful front door: owns the RNG, per-episode buffers, and the commit path.

    Thread-safe; per-episode operations serialize on an engine lock while
    routing itself reads an immutable snapshot. Used by the gateway and CLI;
    the simulator drives the same free functions directly for tighter control.
    """

    def __init__(
        self,
        kb: ExperienceBase,
        pool: ModelPool,
        config: RouterConfig,
        embedder: Embedder | None = None,
        table: KeywordTable = DEFAULT_KEYWORDS,
        tool_fallback: ToolPredictor | None = None,
        clock: Callable[[], datetime] | None = None,
    ) -> None:
        self.kb = kb
        self.pool = pool
        self.config = config
        self.embedder = embedder if embedder is not None else HashingEmbedder(kb.dimension)
        self.table = table
        self.tool_fallback = tool_fallback
        self.clock = clock if clock is not None else lambda: datetime.now(timezone.utc)
        self._rng = make_rng(config.rng_seed)
        self._buffers: dict[str, EpisodeBuffer] = {}
        self._decision_episode: dict[str, str] = {}
        self._last_touch: dict[str, datetime] = {}
        self._lock = threading.Lock()

    def route_step(
        self,
        episode_id: str,
        step_index: int,
        role: RoleId,
        instruction: str,
        phase: Phase | None = None,
    ) -> RoutingDecision:
        ctx = build_context(role, instruction, self.embedder, episode_id, step_index)
        config = self.config if phase is None else replace(self.config, phase=phase)
        with self._lock:
            snapshot = self.kb.snapshot()
            decision = route(
                ctx, snapshot, self.pool, config, self._rng, self.table, self.tool_fallback
            )
            buffer = self._buffers.setdefault(episode_id, EpisodeBuffer(episode_id=episode_id))
            buffer.add(decision, ctx, timestamp=self.clock())
            self._decision_episode[decision.decision_id] = episode_id
            self._last_touch[episode_id] = self.clock()
        return decision

    def record_feedback(
        self, decision_id: str, cost: float, duration: float, step_success: int
    ) -> None:
        with self._lock:
            episode_id = self._decision_episode.get(decision_id)
            if episode_id is None or episode_id not in self._buffers:
                raise UnknownDecision(decision_id)
            record_step(self._buffers[episode_id], decision_id, cost, duration, step_success)
            self._last_touch[episode_id] = self.clock()

    def complete(self, episode_id: str, task_performance: float) -> tuple[int, int]:
        """Commit the episode; returns (new generation, records added)."""
        with self._lock:
            buffer = self._buffers.get(episode_id)
            if buffer is None:
                raise UnknownDecision(f"unknown episode {episode_id}")
            count = len(buffer.steps)
            generation = complete_task(buffer, task_performance, self.kb, self.embedder)
            self._forget(episode_id)
            return generation, count

    def has_episode(self, episode_id: str) -> bool:
        with self._lock:
            return episode_id in self._buffers

    def sweep_expired(self, max_idle_seconds: float, now: datetime | None = None) -> list[str]:
        """Discard buffers idle past the deadline. Expired episodes are never
        committed — records without a task score are forbidden."""
        now = now or self.clock()
        expired = []
        with self._lock:
            for episode_id, touched in list(self._last_touch.items()):
                if (now - touched).total_seconds() > max_idle_seconds:
                    expired.append(episode_id)
                    self._forget(episode_id)
        return expired

    def _forget(self, episode_id: str) -> None:
        buffer = self._buffers.pop(episode_id, None)
        self._last_touch.pop(episode_id, None)
        if buffer is not None:
            for step in buffer.steps:
                self._decision_episode.pop(step.decision_id, None)
        for did, eid in list(self._decision_episode.items()):
            if eid == episode_id:
                self._decision_episode.pop(did, None)
