"""TOML configuration loading for the router, pool, embedder, and simulator.

Top-level keys mirror RouterConfig fields (`theta_sim`, `variance_floor`,
`min_pseudo_count`, `fallback_model`, `explore_rate`, `phase`,
`branch_factor`, `rng_seed`), weights live under `[weights]` as p/c/d, the
embedding provider under `[embedding]`, models as `[[models]]` entries with
`name`, `input_price_per_m`, `output_price_per_m` and optional behavioral
fields for the simulator, and the task generator under `[generator]`. Every
section is optional; omissions fall back to the package defaults.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import Phase, RouterConfig, TrilemmaWeights
from .embedding import Embedder, make_embedder
from .errors import InvalidConfig
from .router import ModelPool
from .simulator import (
    DIFFICULTIES,
    GeneratorConfig,
    SimEnvironment,
    SyntheticModelSpec,
    default_environment,
    default_generator,
    default_model_specs,
    default_pool,
)


def load_toml(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise InvalidConfig(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfig(f"{path}: {exc}")


def router_config_from(raw: Mapping[str, Any]) -> RouterConfig:
    weights_raw = raw.get("weights", {})
    defaults = TrilemmaWeights()
    try:
        weights = TrilemmaWeights(
            w_p=float(weights_raw.get("p", defaults.w_p)),
            w_c=float(weights_raw.get("c", defaults.w_c)),
            w_d=float(weights_raw.get("d", defaults.w_d)),
        )
        phase = Phase(raw.get("phase", Phase.INFERENCE.value))
        base = RouterConfig()
        return RouterConfig(
            theta_sim=float(raw.get("theta_sim", base.theta_sim)),
            weights=weights,
            variance_floor=float(raw.get("variance_floor", base.variance_floor)),
            min_pseudo_count=float(raw.get("min_pseudo_count", base.min_pseudo_count)),
            fallback_model=raw.get("fallback_model"),
            explore_rate=float(raw.get("explore_rate", base.explore_rate)),
            phase=phase,
            branch_factor=int(raw.get("branch_factor", base.branch_factor)),
            rng_seed=int(raw.get("rng_seed", base.rng_seed)),
            normalize_metrics=bool(raw.get("normalize_metrics", base.normalize_metrics)),
        )
    except (ValueError, TypeError) as exc:
        raise InvalidConfig(f"bad router configuration: {exc}") from exc


def embedder_from(raw: Mapping[str, Any]) -> Embedder:
    section = raw.get("embedding", {})
    try:
        return make_embedder(
            kind=section.get("kind", "hash"),
            dimension=int(section.get("dimension", 384)),
            endpoint=section.get("endpoint"),
        )
    except ValueError as exc:
        raise InvalidConfig(f"bad embedding configuration: {exc}") from exc


def pool_from(raw: Mapping[str, Any]) -> ModelPool:
    entries = raw.get("models")
    if not entries:
        return default_pool()
    try:
        return ModelPool.of(
            (
                str(e["name"]),
                float(e["input_price_per_m"]),
                float(e["output_price_per_m"]),
            )
            for e in entries
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidConfig(f"bad model pool entry: {exc}") from exc


def generator_from(raw: Mapping[str, Any]) -> GeneratorConfig:
    section = raw.get("generator")
    if not section:
        return default_generator()
    base = default_generator()
    roles = tuple(section.get("roles", base.roles))
    templates: dict[tuple[str, str], str] = dict(base.templates)
    for role, by_diff in section.get("templates", {}).items():
        for diff, tpl in by_diff.items():
            templates[(role, diff)] = str(tpl)
    mix = dict(base.difficulty_mix)
    for role, triple in section.get("difficulty_mix", {}).items():
        mix[role] = tuple(float(x) for x in triple)
    tools = dict(base.role_tools)
    for role, ts in section.get("role_tools", {}).items():
        tools[role] = frozenset(str(t) for t in ts)
    try:
        return GeneratorConfig(
            roles=roles,
            role_weights=tuple(float(w) for w in section.get("role_weights", base.role_weights)),
            difficulty_mix=mix,
            role_tools=tools,
            templates=templates,
            slot_vocab=tuple(section.get("slot_vocab", base.slot_vocab)),
            min_steps=int(section.get("min_steps", base.min_steps)),
            max_steps=int(section.get("max_steps", base.max_steps)),
            critical_prob=float(section.get("critical_prob", base.critical_prob)),
            force_final_critical=bool(section.get("force_final_critical", base.force_final_critical)),
            performance_mode=str(section.get("performance_mode", base.performance_mode)),
        )
    except (ValueError, TypeError) as exc:
        raise InvalidConfig(f"bad generator configuration: {exc}") from exc


def model_specs_from(raw: Mapping[str, Any], generator: GeneratorConfig) -> dict[str, SyntheticModelSpec]:
    entries = raw.get("models")
    if not entries:
        return default_model_specs()
    defaults = default_model_specs()
    specs: dict[str, SyntheticModelSpec] = {}
    for e in entries:
        try:
            name = str(e["name"])
            known = defaults.get(name)
            success_raw = e.get("success_prob")
            if success_raw is not None:
                success: dict[tuple[str, str], float] = {}
                shared = success_raw.get("default")
                for role in generator.roles:
                    by_diff = success_raw.get(role, shared)
                    if by_diff is None:
                        raise InvalidConfig(
                            f"model {name!r}: success_prob missing role {role!r} and no default"
                        )
                    for diff in DIFFICULTIES:
                        success[(role, diff)] = float(by_diff[diff])
            elif known is not None:
                success = dict(known.success_prob)
            else:
                raise InvalidConfig(f"model {name!r}: success_prob required for unknown models")
            token_raw = e.get("token_profile")
            if token_raw is not None:
                token = {r: (float(v[0]), float(v[1])) for r, v in token_raw.items()}
            elif known is not None:
                token = dict(known.token_profile)
            else:
                raise InvalidConfig(f"model {name!r}: token_profile required for unknown models")
            specs[name] = SyntheticModelSpec(
                model=name,
                input_price_per_m=float(e["input_price_per_m"]),
                output_price_per_m=float(e["output_price_per_m"]),
                success_prob=success,
                token_profile=token,
                latency_base=float(e.get("latency_base", known.latency_base if known else 2.0)),
                speed_factor=float(e.get("speed_factor", known.speed_factor if known else 1.0)),
                sigma_latency=float(e.get("sigma_latency", known.sigma_latency if known else 0.25)),
                sigma_tokens=float(e.get("sigma_tokens", known.sigma_tokens if known else 0.2)),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidConfig(f"bad model spec entry: {exc}") from exc
    return specs


@dataclass(frozen=True)
class RuntimeSetup:
    """Everything a CLI command or the gateway needs, resolved from one file."""

    router: RouterConfig
    pool: ModelPool
    embedder: Embedder
    environment: SimEnvironment


def load_runtime(path: str | Path | None) -> RuntimeSetup:
    if path is None:
        return RuntimeSetup(
            router=RouterConfig(),
            pool=default_pool(),
            embedder=make_embedder(),
            environment=default_environment(),
        )
    raw = load_toml(path)
    generator = generator_from(raw)
    specs = model_specs_from(raw, generator)
    return RuntimeSetup(
        router=router_config_from(raw),
        pool=pool_from(raw),
        embedder=embedder_from(raw),
        environment=SimEnvironment(specs=specs, generator=generator),
    )
