"""Per-model trilemma statistics and non-dominated filtering.

A model's performance sample for a record is task_performance × step_success:
a step only "earns" the task score when its own execution succeeded. Cost and
duration samples are taken raw (USD, seconds). The sample lists ride along in
the profile so the selector can fit posteriors without re-querying the store.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import ModelId
from .errors import EmptyCandidateSet, EmptyInput
from .retrieval import CandidateSet


@dataclass(frozen=True)
class TrilemmaProfile:
    """Aggregated (performance, cost, duration) evidence for one model."""

    model: ModelId
    p_hat: float
    c_hat: float
    d_hat: float
    n: int
    perf_samples: tuple[float, ...]
    cost_samples: tuple[float, ...]
    dur_samples: tuple[float, ...]


def aggregate_stats(cand: CandidateSet) -> list[TrilemmaProfile]:
    """One profile per distinct model in the candidate set, in model-id order."""
    if len(cand) == 0:
        raise EmptyCandidateSet("cannot aggregate over an empty candidate set")
    groups: dict[ModelId, list[tuple[float, float, float]]] = {}
    for rec in cand.records:
        groups.setdefault(rec.model, []).append(
            (rec.task_performance * rec.step_success, rec.cost, rec.duration)
        )
    profiles = []
    for model in sorted(groups):
        samples = groups[model]
        n = len(samples)
        perf = tuple(s[0] for s in samples)
        cost = tuple(s[1] for s in samples)
        dur = tuple(s[2] for s in samples)
        profiles.append(
            TrilemmaProfile(
                model=model,
                p_hat=math.fsum(perf) / n,
                c_hat=math.fsum(cost) / n,
                d_hat=math.fsum(dur) / n,
                n=n,
                perf_samples=perf,
                cost_samples=cost,
                dur_samples=dur,
            )
        )
    return profiles


def dominates(a: TrilemmaProfile, b: TrilemmaProfile) -> bool:
    """True iff `a` is at least as good on all three axes and strictly better on one."""
    return (
        a.p_hat >= b.p_hat
        and a.c_hat <= b.c_hat
        and a.d_hat <= b.d_hat
        and (a.p_hat > b.p_hat or a.c_hat < b.c_hat or a.d_hat < b.d_hat)
    )


def pareto_filter(profiles: list[TrilemmaProfile]) -> list[TrilemmaProfile]:
    """Drop every profile dominated by some other; input order is preserved.

    Never empty: the maximum-performance profile cannot be dominated. Profiles
    equal on all three axes do not dominate each other, so duplicates survive
    together and the tie is resolved downstream by sampling.
    """
    if not profiles:
        raise EmptyInput("pareto_filter requires at least one profile")
    perf = np.array([p.p_hat for p in profiles])
    cost = np.array([p.c_hat for p in profiles])
    dur = np.array([p.d_hat for p in profiles])
    keep = kernels.pareto_keep(perf, cost, dur)
    return [p for p, k in zip(profiles, keep) if k]
