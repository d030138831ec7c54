"""Synthetic agentic-workflow environment with planted ground truth.

Tasks are sequences of role-tagged steps rendered from per-(role, difficulty)
instruction templates; instructions carry tool trigger keywords exactly when
the step requires tools. Model behavior is fully parameterized — per-stratum
success probabilities, token volumes, and latency factors — so every routing
claim can be checked against closed-form expectations instead of live systems.

Prices are real published per-million-token rates; the behavioral numbers
attached to them are simulator fiction, chosen so the pool exhibits a genuine
cheap-easy / premium-hard trade-off. They are not measurements.

Noise is mean-preserving lognormal (tokens and latency), which keeps the
analytical oracle exact: E[cost] and E[duration] equal their plug-in formulas.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from typing import Iterator, Mapping

from .core import MetricTriple, ModelId, Phase, RoleId, RouterConfig, ToolId
from .embedding import Embedder, HashingEmbedder
from .errors import InvalidConfig, InvalidGeneratorConfig, UnknownRole
from .experience_base import ExperienceBase
from .pareto import TrilemmaProfile, dominates
from .retrieval import DEFAULT_KEYWORDS, KeywordTable, build_context
from .rng import RandomSource, derive
from .router import (
    EpisodeBuffer,
    ModelPool,
    RoutingDecision,
    complete_task,
    record_step,
    route,
    route_branched,
)

DIFFICULTIES = ("easy", "medium", "hard")

# Records committed by the simulator get deterministic timestamps: this epoch
# plus accumulated simulated seconds. Keeps full runs byte-replayable.
SIM_EPOCH = datetime(2025, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class TaskStep:
    role: RoleId
    instruction: str
    required_tools: frozenset[ToolId]
    difficulty: str
    critical: bool


@dataclass(frozen=True)
class SyntheticTask:
    task_id: str
    steps: tuple[TaskStep, ...]


@dataclass(frozen=True)
class SyntheticModelSpec:
    """Ground truth for one model: prices plus planted behavior."""

    model: ModelId
    input_price_per_m: float
    output_price_per_m: float
    success_prob: Mapping[tuple[RoleId, str], float]
    token_profile: Mapping[RoleId, tuple[float, float]]
    latency_base: float
    speed_factor: float
    sigma_latency: float = 0.25
    sigma_tokens: float = 0.2

    def __post_init__(self) -> None:
        if self.input_price_per_m < 0 or self.output_price_per_m < 0:
            raise InvalidConfig(f"{self.model}: prices must be >= 0")
        for key, p in self.success_prob.items():
            if not (0.0 <= p <= 1.0):
                raise InvalidConfig(f"{self.model}: success_prob{key} out of [0,1]")
        if self.latency_base < 0 or self.speed_factor < 0:
            raise InvalidConfig(f"{self.model}: latency parameters must be >= 0")


@dataclass(frozen=True)
class GeneratorConfig:
    """Task shape and instruction texture.

    Instructions come from two kinds of template families: role-specific ones
    (keyed by role and difficulty, one topic slot) and difficulty-wide ones
    shared across roles (a role-dependent action verb plus a topic slot).
    Shared families give the semantic facet cross-role reach: a hard step can
    retrieve hard-step precedents from every role, not just its own.
    """

    roles: tuple[RoleId, ...]
    role_weights: tuple[float, ...]
    difficulty_mix: Mapping[RoleId, tuple[float, float, float]]
    role_tools: Mapping[RoleId, frozenset[ToolId]]
    templates: Mapping[tuple[RoleId, str], str]
    slot_vocab: tuple[str, ...]
    shared_templates: Mapping[str, str] | None = None
    role_actions: Mapping[RoleId, str] | None = None
    shared_prob: float = 0.8
    min_steps: int = 8
    max_steps: int = 12
    critical_prob: float = 0.08
    force_final_critical: bool = True
    performance_mode: str = "binary"  # or "fractional"

    def __post_init__(self) -> None:
        if not self.roles:
            raise InvalidGeneratorConfig("at least one role required")
        if len(self.role_weights) != len(self.roles):
            raise InvalidGeneratorConfig("role_weights must match roles")
        if any(w < 0 for w in self.role_weights) or sum(self.role_weights) <= 0:
            raise InvalidGeneratorConfig("role_weights must be non-negative, not all zero")
        if not (1 <= self.min_steps <= self.max_steps):
            raise InvalidGeneratorConfig("need 1 <= min_steps <= max_steps")
        if not (0.0 <= self.critical_prob <= 1.0):
            raise InvalidGeneratorConfig("critical_prob out of [0,1]")
        if not (0.0 <= self.shared_prob <= 1.0):
            raise InvalidGeneratorConfig("shared_prob out of [0,1]")
        if self.performance_mode not in ("binary", "fractional"):
            raise InvalidGeneratorConfig(f"unknown performance_mode {self.performance_mode!r}")
        for role in self.roles:
            mix = self.difficulty_mix.get(role)
            if mix is None or len(mix) != 3 or any(m < 0 for m in mix) or sum(mix) <= 0:
                raise InvalidGeneratorConfig(f"bad difficulty mix for role {role!r}")
            for diff in DIFFICULTIES:
                if (role, diff) not in self.templates:
                    raise InvalidGeneratorConfig(f"missing template for ({role}, {diff})")
        if self.shared_prob > 0 and self.shared_templates is not None:
            for diff in DIFFICULTIES:
                if diff not in self.shared_templates:
                    raise InvalidGeneratorConfig(f"missing shared template for {diff!r}")
            if self.role_actions is None or any(r not in self.role_actions for r in self.roles):
                raise InvalidGeneratorConfig("shared templates require an action per role")
        if not self.slot_vocab:
            raise InvalidGeneratorConfig("slot_vocab must be non-empty")


def gen_task(cfg: GeneratorConfig, rng: RandomSource, task_id: str | None = None) -> SyntheticTask:
    """Deterministic given the rng state; step count uniform on [min, max]."""
    if task_id is None:
        task_id = f"task-{int(rng.integers(1 << 62)):016x}"
    n = int(rng.integers(cfg.min_steps, cfg.max_steps + 1))
    weights = [w / sum(cfg.role_weights) for w in cfg.role_weights]
    use_shared = cfg.shared_templates is not None and cfg.role_actions is not None
    steps = []
    for i in range(n):
        role = cfg.roles[int(rng.choice(len(cfg.roles), p=weights))]
        mix = cfg.difficulty_mix[role]
        mix = [m / sum(mix) for m in mix]
        difficulty = DIFFICULTIES[int(rng.choice(3, p=mix))]
        critical = bool(rng.random() < cfg.critical_prob)
        if cfg.force_final_critical and i == n - 1 and not any(s.critical for s in steps):
            critical = True
        slot = cfg.slot_vocab[int(rng.integers(len(cfg.slot_vocab)))]
        shared = use_shared and float(rng.random()) < cfg.shared_prob
        if shared:
            instruction = cfg.shared_templates[difficulty].format(
                cfg.role_actions[role], slot
            )
        else:
            instruction = cfg.templates[(role, difficulty)].format(slot)
        steps.append(
            TaskStep(
                role=role,
                instruction=instruction,
                required_tools=cfg.role_tools.get(role, frozenset()),
                difficulty=difficulty,
                critical=critical,
            )
        )
    return SyntheticTask(task_id=task_id, steps=tuple(steps))


def task_stream(cfg: GeneratorConfig, rng: RandomSource, prefix: str = "task-") -> Iterator[SyntheticTask]:
    """Endless deterministic task source with counter-based unique ids."""
    i = 0
    while True:
        yield gen_task(cfg, rng, task_id=f"{prefix}{i:06d}")
        i += 1


def step_cost(spec: SyntheticModelSpec, input_tokens: float, output_tokens: float) -> float:
    """Linear price formula: (in·p_in + out·p_out) / 1e6 USD."""
    return (
        input_tokens * spec.input_price_per_m + output_tokens * spec.output_price_per_m
    ) / 1e6


def _lognormal_factor(rng: RandomSource, sigma: float) -> float:
    # mean-preserving: E[exp(N(-sigma²/2, sigma))] == 1
    return math.exp(rng.normal(-0.5 * sigma * sigma, sigma))


def exec_step(
    spec: SyntheticModelSpec, step: TaskStep, rng: RandomSource
) -> tuple[int, float, float]:
    """Simulate one step: (step_success, cost_usd, duration_s).

    Draw order: success uniform, input-token factor, output-token factor,
    latency factor — four rng draws, fixed."""
    key = (step.role, step.difficulty)
    if key not in spec.success_prob:
        raise UnknownRole(f"{spec.model}: no success probability for {key}")
    if step.role not in spec.token_profile:
        raise UnknownRole(f"{spec.model}: no token profile for role {step.role!r}")
    success = 1 if float(rng.random()) < spec.success_prob[key] else 0
    mean_in, mean_out = spec.token_profile[step.role]
    in_tok = mean_in * _lognormal_factor(rng, spec.sigma_tokens)
    out_tok = mean_out * _lognormal_factor(rng, spec.sigma_tokens)
    duration = spec.latency_base * spec.speed_factor * _lognormal_factor(rng, spec.sigma_latency)
    return success, step_cost(spec, in_tok, out_tok), duration


def expected_metrics(spec: SyntheticModelSpec, role: RoleId, difficulty: str) -> MetricTriple:
    """Closed-form expectations of one step under this spec (exact, no noise)."""
    key = (role, difficulty)
    if key not in spec.success_prob or role not in spec.token_profile:
        raise UnknownRole(f"{spec.model}: no parameters for {key}")
    mean_in, mean_out = spec.token_profile[role]
    return MetricTriple(
        performance=spec.success_prob[key],
        cost=step_cost(spec, mean_in, mean_out),
        duration=spec.latency_base * spec.speed_factor,
    )


def oracle_pareto(
    specs: Mapping[ModelId, SyntheticModelSpec], role: RoleId, difficulty: str
) -> set[ModelId]:
    """Non-dominated models by analytical expectation, using the same dominance
    rule the router applies to empirical profiles."""
    profiles = []
    for model in sorted(specs):
        m = expected_metrics(specs[model], role, difficulty)
        profiles.append(
            TrilemmaProfile(
                model=model,
                p_hat=m.performance,
                c_hat=m.cost,
                d_hat=m.duration,
                n=1,
                perf_samples=(m.performance,),
                cost_samples=(m.cost,),
                dur_samples=(m.duration,),
            )
        )
    return {
        p.model for p in profiles if not any(dominates(q, p) for q in profiles if q is not p)
    }


@dataclass(frozen=True)
class SimEnvironment:
    """Execution oracle handed to the routing loop."""

    specs: Mapping[ModelId, SyntheticModelSpec]
    generator: GeneratorConfig

    def exec_step(self, model: ModelId, step: TaskStep, rng: RandomSource) -> tuple[int, float, float]:
        spec = self.specs.get(model)
        if spec is None:
            raise InvalidConfig(f"no synthetic spec for model {model!r}")
        return exec_step(spec, step, rng)

    def score(self, task: SyntheticTask, successes: list[int]) -> float:
        """Task-level performance: all critical steps succeed (binary mode) or
        the fraction of critical steps that succeeded (fractional mode).
        Tasks without critical steps are scored over all steps."""
        flags = [s.critical for s in task.steps]
        if not any(flags):
            flags = [True] * len(task.steps)
        outcomes = [ok for ok, crit in zip(successes, flags) if crit]
        if self.generator.performance_mode == "binary":
            return 1.0 if all(outcomes) else 0.0
        return sum(outcomes) / len(outcomes)


@dataclass(frozen=True)
class EpisodeResult:
    metrics: MetricTriple
    generation: int
    # one (role, difficulty, model) entry per routed step, all branches included
    selections: tuple[tuple[RoleId, str, ModelId], ...]


def _sim_clock(elapsed: float) -> datetime:
    return SIM_EPOCH + timedelta(seconds=elapsed)


def run_episode(
    kb: ExperienceBase,
    pool: ModelPool,
    config: RouterConfig,
    env: SimEnvironment,
    task: SyntheticTask,
    rng: RandomSource,
    embedder: Embedder | None = None,
    table: KeywordTable = DEFAULT_KEYWORDS,
    sim_start: float = 0.0,
) -> EpisodeResult:
    """Route and execute one task, then commit the trajectory (trajectories, in
    the optimization phase — every branch is executed and committed).

    Reported metrics are the primary path's (branch 0); selections cover all
    branches. The snapshot is taken once per episode: commits only happen at
    episode end, so intra-episode reads are stable by construction.
    """
    if embedder is None:
        embedder = HashingEmbedder(kb.dimension)
    snapshot = kb.snapshot()
    branches = config.branch_factor if config.phase == Phase.OPTIMIZATION else 1

    buffers = [
        EpisodeBuffer(episode_id=task.task_id if b == 0 else f"{task.task_id}#b{b}")
        for b in range(branches)
    ]
    successes: list[list[int]] = [[] for _ in range(branches)]
    costs = [0.0 for _ in range(branches)]
    durations = [0.0 for _ in range(branches)]
    selections: list[tuple[RoleId, str, ModelId]] = []
    elapsed = sim_start

    for idx, step in enumerate(task.steps):
        ctx = build_context(step.role, step.instruction, embedder, task.task_id, idx)
        if config.phase == Phase.OPTIMIZATION:
            decisions = route_branched(ctx, snapshot, pool, config, rng, table)
        else:
            decisions = [route(ctx, snapshot, pool, config, rng, table)]
        for b, decision in enumerate(decisions):
            branch_ctx = ctx if b == 0 else replace(ctx, episode_id=buffers[b].episode_id)
            buffers[b].add(
                decision,
                branch_ctx,
                tools=step.required_tools,
                timestamp=_sim_clock(elapsed),
            )
            ok, cost, duration = env.exec_step(decision.model, step, rng)
            record_step(buffers[b], decision.decision_id, cost, duration, ok)
            successes[b].append(ok)
            costs[b] += cost
            durations[b] += duration
            selections.append((step.role, step.difficulty, decision.model))
        elapsed = sim_start + durations[0]

    generation = kb.generation
    scores = []
    for b, buffer in enumerate(buffers):
        # branches shorter than the task never happen: route_branched pads from the pool
        score = env.score(task, successes[b])
        scores.append(score)
        generation = complete_task(buffer, score, kb, embedder)
    return EpisodeResult(
        metrics=MetricTriple(performance=scores[0], cost=costs[0], duration=durations[0]),
        generation=generation,
        selections=tuple(selections),
    )


@dataclass(frozen=True)
class TrilemmaReport:
    """Aggregate of an evaluation campaign plus the selection histograms."""

    policy: str
    episodes: int
    mean_performance: float
    total_cost: float
    total_duration: float
    selection_by_role: Mapping[tuple[RoleId, ModelId], int]
    selection_by_difficulty: Mapping[tuple[str, ModelId], int]

    def routed_steps(self) -> int:
        return sum(self.selection_by_role.values())

    def share_by_difficulty(self, model: ModelId, difficulty: str) -> float:
        total = sum(c for (d, _m), c in self.selection_by_difficulty.items() if d == difficulty)
        if total == 0:
            return 0.0
        return self.selection_by_difficulty.get((difficulty, model), 0) / total


def parse_policy(policy: str) -> tuple[str, ModelId | None]:
    """"evoroute" | "random" | "fixed:<model>" -> (kind, fixed model or None)."""
    if policy == "evoroute":
        return "evoroute", None
    if policy == "random":
        return "random", None
    if policy.startswith("fixed:") and len(policy) > len("fixed:"):
        return "fixed", policy.split(":", 1)[1]
    raise InvalidConfig(f"unknown policy {policy!r}")


def evaluate(
    policy: str,
    n_episodes: int,
    env: SimEnvironment,
    pool: ModelPool,
    config: RouterConfig,
    seed: int,
    kb: ExperienceBase | None = None,
    embedder: Embedder | None = None,
    table: KeywordTable = DEFAULT_KEYWORDS,
    task_prefix: str = "eval-",
) -> TrilemmaReport:
    """Run `n_episodes` under a policy and aggregate the trilemma triple.

    Task generation draws from a stream keyed only by (seed, prefix), so two
    policies evaluated with the same seed see identical task sequences.
    """
    if n_episodes < 1:
        raise InvalidConfig("evaluate requires n_episodes >= 1")
    kind, fixed_model = parse_policy(policy)
    if kind == "fixed" and fixed_model not in pool:
        raise InvalidConfig(f"fixed model {fixed_model!r} not in pool")
    if embedder is None:
        embedder = HashingEmbedder(kb.dimension if kb is not None else 384)
    if kb is None:
        kb = ExperienceBase(dimension=embedder.dimension)

    tasks = task_stream(env.generator, derive(seed, 0xA11CE), prefix=task_prefix)
    perf_sum = 0.0
    total_cost = 0.0
    total_duration = 0.0
    by_role: dict[tuple[RoleId, ModelId], int] = {}
    by_diff: dict[tuple[str, ModelId], int] = {}

    for i in range(n_episodes):
        task = next(tasks)
        ep_rng = derive(seed, 0xE9, i)
        if kind == "evoroute":
            result = run_episode(kb, pool, config, env, task, ep_rng, embedder, table)
            perf = result.metrics.performance
            total_cost += result.metrics.cost
            total_duration += result.metrics.duration
            for role, diff, model in result.selections:
                by_role[(role, model)] = by_role.get((role, model), 0) + 1
                by_diff[(diff, model)] = by_diff.get((diff, model), 0) + 1
        else:
            buffer = EpisodeBuffer(episode_id=task.task_id)
            successes = []
            elapsed = 0.0
            for idx, step in enumerate(task.steps):
                if kind == "fixed":
                    model = fixed_model
                else:
                    model = pool.models[int(ep_rng.integers(len(pool)))]
                ctx = build_context(step.role, step.instruction, embedder, task.task_id, idx)
                decision = RoutingDecision(
                    decision_id=f"{task.task_id}:{idx}",
                    model=model,
                    phase=config.phase,
                    candidate_count=0,
                    pareto_models=(),
                    sampled_utilities=(),
                    fallback_used=True,
                    seed_used=seed,
                )
                buffer.add(decision, ctx, tools=step.required_tools, timestamp=_sim_clock(elapsed))
                ok, cost, duration = env.exec_step(model, step, ep_rng)
                record_step(buffer, decision.decision_id, cost, duration, ok)
                successes.append(ok)
                total_cost += cost
                total_duration += duration
                elapsed += duration
                by_role[(step.role, model)] = by_role.get((step.role, model), 0) + 1
                by_diff[(step.difficulty, model)] = by_diff.get((step.difficulty, model), 0) + 1
            perf = env.score(task, successes)
            complete_task(buffer, perf, kb, embedder)
        perf_sum += perf

    return TrilemmaReport(
        policy=policy,
        episodes=n_episodes,
        mean_performance=perf_sum / n_episodes,
        total_cost=total_cost,
        total_duration=total_duration,
        selection_by_role=by_role,
        selection_by_difficulty=by_diff,
    )


def report_csv(report: TrilemmaReport) -> str:
    buf = io.StringIO()
    buf.write("policy,episodes,mean_performance,total_cost_usd,total_duration_s\n")
    buf.write(
        f"{report.policy},{report.episodes},{report.mean_performance!r},"
        f"{report.total_cost!r},{report.total_duration!r}\n"
    )
    return buf.getvalue()


def role_table_csv(report: TrilemmaReport) -> str:
    """Per-role selection shares, one row per (role, model), sorted."""
    buf = io.StringIO()
    buf.write("role,model,count,share\n")
    totals: dict[RoleId, int] = {}
    for (role, _model), count in report.selection_by_role.items():
        totals[role] = totals.get(role, 0) + count
    for (role, model), count in sorted(report.selection_by_role.items()):
        share = count / totals[role]
        buf.write(f"{role},{model},{count},{share!r}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Default planted pool and generator.
# Prices are published per-million-token rates; everything behavioral below is
# synthetic calibration chosen to exhibit a cheap-easy / premium-hard trade-off.
# ---------------------------------------------------------------------------

DEFAULT_ROLES = ("planner", "web_agent", "coder", "file_agent")

_DEFAULT_TOKEN_PROFILE: dict[RoleId, tuple[float, float]] = {
    "planner": (2500.0, 400.0),
    "web_agent": (3000.0, 700.0),
    "coder": (2000.0, 900.0),
    "file_agent": (1500.0, 300.0),
}

_DEFAULT_TEMPLATES: dict[tuple[RoleId, str], str] = {
    ("planner", "easy"): "outline a short plan to verify the {} figure",
    ("planner", "medium"): "draft a sequenced plan covering dependencies for the {} milestone",
    ("planner", "hard"): "decompose conflicting objectives into a recovery plan for the {} incident",
    ("web_agent", "easy"): "search for the latest {} number on the official page",
    ("web_agent", "medium"): "search several archives and reconcile mismatched {} totals",
    ("web_agent", "hard"): "search obscure registries to cross reference the disputed {} claim",
    ("coder", "easy"): "run the helper script and print a {} summary table",
    ("coder", "medium"): "run the pipeline then plot intermediate {} diagnostics",
    ("coder", "hard"): "run the profiler and rewrite the slow {} kernel safely",
    ("file_agent", "easy"): "open the attached {} document and copy its title",
    ("file_agent", "medium"): "collate appendix rows of the {} spreadsheet into one sheet",
    ("file_agent", "hard"): "reconstruct the corrupted {} archive from partial fragments",
}

# Difficulty-wide families shared by every role: long fixed stems keep any two
# instances above the 0.85 similarity threshold, while the role-specific
# action verb carries the tool trigger keyword for tool-using roles.
_SHARED_TEMPLATES: dict[str, str] = {
    "easy": "{} the single clearly labelled {} entry and confirm its plainly "
    "stated value against the provided reference card without further checks",
    "medium": "{} the staged {} workload across three linked phases and reconcile "
    "partial mismatches between intermediate outputs before continuing onward",
    "hard": "{} the tangled {} dossier where principal sources contradict each "
    "other and assemble a defensible resolution despite missing ground facts",
}

_ROLE_ACTIONS: dict[RoleId, str] = {
    "planner": "assess",
    "web_agent": "search",
    "coder": "run",
    "file_agent": "collate",
}

# "harbor" replaces a word whose hash bucket cancelled against a trigger
# keyword; the vocabulary is curated to be collision-clean for the default
# templates (see the template-geometry test).
_SLOT_VOCAB = (
    "budget", "census", "climate", "energy", "genome", "harbor", "inventory",
    "lattice", "market", "neutrino", "orbit", "protein", "quarter", "revenue",
    "sensor", "tariff", "traffic", "vaccine", "wafer", "yield",
)


def _success(easy: float, medium: float, hard: float) -> dict[tuple[RoleId, str], float]:
    return {
        (role, diff): p
        for role in DEFAULT_ROLES
        for diff, p in zip(DIFFICULTIES, (easy, medium, hard))
    }


def default_model_specs() -> dict[ModelId, SyntheticModelSpec]:
    """Six-model planted pool. gpt-4o is deliberately dominated by
    gemini-2.5-pro (pricier inputs, weaker everywhere) so filtration has work
    to do; qwen3-14b is the cheap specialist, claude-4 the premium generalist."""
    base = 0.8
    specs = [
        SyntheticModelSpec(
            model="qwen3-14b",
            input_price_per_m=0.05,
            output_price_per_m=0.22,
            success_prob=_success(0.995, 0.93, 0.72),
            token_profile=_DEFAULT_TOKEN_PROFILE,
            latency_base=base,
            speed_factor=0.4,
        ),
        SyntheticModelSpec(
            model="gemini-2.5-flash",
            input_price_per_m=0.3,
            output_price_per_m=2.5,
            success_prob=_success(0.99, 0.965, 0.92),
            token_profile=_DEFAULT_TOKEN_PROFILE,
            latency_base=base,
            speed_factor=0.5,
        ),
        SyntheticModelSpec(
            model="gpt-4o",
            input_price_per_m=2.5,
            output_price_per_m=10.0,
            success_prob=_success(0.975, 0.945, 0.9),
            token_profile=_DEFAULT_TOKEN_PROFILE,
            latency_base=base,
            speed_factor=1.6,
        ),
        SyntheticModelSpec(
            model="gpt-4.1",
            input_price_per_m=2.0,
            output_price_per_m=8.0,
            success_prob=_success(0.98, 0.965, 0.925),
            token_profile=_DEFAULT_TOKEN_PROFILE,
            latency_base=base,
            speed_factor=1.0,
        ),
        SyntheticModelSpec(
            model="gemini-2.5-pro",
            input_price_per_m=1.25,
            output_price_per_m=10.0,
            success_prob=_success(0.985, 0.975, 0.945),
            token_profile=_DEFAULT_TOKEN_PROFILE,
            latency_base=base,
            speed_factor=1.4,
        ),
        SyntheticModelSpec(
            model="claude-4",
            input_price_per_m=3.0,
            output_price_per_m=15.0,
            success_prob=_success(0.985, 0.98, 0.97),
            token_profile=_DEFAULT_TOKEN_PROFILE,
            latency_base=base,
            speed_factor=2.0,
        ),
    ]
    return {s.model: s for s in specs}


def default_generator() -> GeneratorConfig:
    return GeneratorConfig(
        roles=DEFAULT_ROLES,
        role_weights=(0.2, 0.3, 0.25, 0.25),
        difficulty_mix={
            "planner": (0.1, 0.3, 0.6),
            "web_agent": (0.3, 0.5, 0.2),
            "coder": (0.3, 0.4, 0.3),
            "file_agent": (0.8, 0.15, 0.05),
        },
        role_tools={
            "planner": frozenset(),
            "web_agent": frozenset({"web_search"}),
            "coder": frozenset({"code_interpreter"}),
            "file_agent": frozenset(),
        },
        templates=_DEFAULT_TEMPLATES,
        slot_vocab=_SLOT_VOCAB,
        shared_templates=_SHARED_TEMPLATES,
        role_actions=_ROLE_ACTIONS,
    )


def default_environment() -> SimEnvironment:
    return SimEnvironment(specs=default_model_specs(), generator=default_generator())


def default_pool() -> ModelPool:
    specs = default_model_specs()
    return ModelPool.of(
        (name, specs[name].input_price_per_m, specs[name].output_price_per_m)
        for name in specs
    )


def cheapest_model(specs: Mapping[ModelId, SyntheticModelSpec]) -> ModelId:
    return min(specs, key=lambda m: specs[m].input_price_per_m + specs[m].output_price_per_m)


def premium_model(specs: Mapping[ModelId, SyntheticModelSpec]) -> ModelId:
    return max(specs, key=lambda m: specs[m].input_price_per_m + specs[m].output_price_per_m)
