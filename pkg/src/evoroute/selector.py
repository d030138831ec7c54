"""Thompson sampling over the Pareto set.

Each surviving model gets a Normal-Inverse-Gamma posterior per metric, fit
from its retrieved samples. One stochastic realization per (model, metric) is
drawn — variance from the Inverse-Gamma, mean from the conditional Normal,
then a predictive observation — and the model with the highest sampled
utility wins. Posteriors are re-fit from evidence on every decision; nothing
is persisted between calls.

With one sample the textbook scale parameter collapses to zero, so the fit
falls back to a configured pseudo-count and variance floor; as n grows the
posterior converges to the plain sample-statistics parameterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelId, RouterConfig, TrilemmaWeights
from .errors import EmptyInput, EmptySamples
from .pareto import TrilemmaProfile
from .rng import RandomSource

_DEFAULT_CONFIG = RouterConfig()


@dataclass(frozen=True)
class NIGPosterior:
    """Normal-Inverse-Gamma over one metric of one model: location mu,
    pseudo-count nu, shape alpha, scale beta. All of nu/alpha/beta positive."""

    mu: float
    nu: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.nu <= 0 or self.alpha <= 0 or self.beta <= 0:
            raise ValueError(f"degenerate posterior: {self}")


@dataclass(frozen=True)
class SampledUtility:
    model: ModelId
    x_p: float
    x_c: float
    x_d: float
    utility: float


@dataclass(frozen=True)
class SelectionResult:
    model: ModelId
    utilities: tuple[SampledUtility, ...]
    greedy: bool = False


def fit_nig(samples: list[float] | tuple[float, ...], config: RouterConfig = _DEFAULT_CONFIG) -> NIGPosterior:
    """Fit the posterior from raw samples.

    n >= 2: mu = mean, nu = n, alpha = n/2, beta = (n-1)s²/2 floored at the
    variance floor. n = 1: the single observation with the configured
    pseudo-count (alpha = 0.5 + nu/2, beta = variance floor).
    """
    n = len(samples)
    if n == 0:
        raise EmptySamples("fit_nig requires at least one sample")
    if n == 1:
        nu = config.min_pseudo_count
        return NIGPosterior(
            mu=float(samples[0]),
            nu=nu,
            alpha=0.5 + nu / 2.0,
            beta=config.variance_floor,
        )
    mean = math.fsum(samples) / n
    half_ssd = math.fsum((x - mean) ** 2 for x in samples) / 2.0  # == (n-1)s²/2
    return NIGPosterior(
        mu=mean,
        nu=float(n),
        alpha=n / 2.0,
        beta=max(half_ssd, config.variance_floor),
    )


def sample_metric(posterior: NIGPosterior, rng: RandomSource) -> float:
    """One predictive draw: sigma² ~ InvGamma(alpha, beta) realized as
    beta / Gamma(alpha, 1), mu~ ~ N(mu, sigma²/nu), then x~ ~ N(mu~, sigma²).

    Consumes exactly three draws from `rng`, in that order.
    """
    g = rng.standard_gamma(posterior.alpha)
    if g <= 0.0:
        g = np.finfo(np.float64).tiny
    sigma2 = posterior.beta / g
    mu_t = rng.normal(posterior.mu, math.sqrt(sigma2 / posterior.nu))
    return float(rng.normal(mu_t, math.sqrt(sigma2)))


def utility_of(x_p: float, x_c: float, x_d: float, weights: TrilemmaWeights) -> float:
    return weights.w_p * x_p - weights.w_c * x_c - weights.w_d * x_d


def _minmax_scale(samples: tuple[float, ...], lo: float, hi: float) -> tuple[float, ...]:
    if hi <= lo:
        return tuple(0.5 for _ in samples)
    span = hi - lo
    return tuple((x - lo) / span for x in samples)


def select(
    profiles: list[TrilemmaProfile],
    weights: TrilemmaWeights,
    rng: RandomSource,
    config: RouterConfig = _DEFAULT_CONFIG,
) -> SelectionResult:
    """Pick the argmax of sampled utilities over (already Pareto-filtered) profiles.

    Per profile, in input order: fit and draw performance, then cost, then
    duration (nine rng draws per model). Ties break by lowest mean cost, then
    lowest mean duration, then model id. With config.greedy the draws are
    skipped and means are used directly (ablation path). config.normalize_metrics
    min-max scales each metric over the profile means before fitting; default
    off because it changes the meaning of the configured weights.
    """
    if not profiles:
        raise EmptyInput("select requires at least one profile")

    metric_samples: list[tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]] = [
        (p.perf_samples, p.cost_samples, p.dur_samples) for p in profiles
    ]
    if config.normalize_metrics:
        lop, hip = min(p.p_hat for p in profiles), max(p.p_hat for p in profiles)
        loc, hic = min(p.c_hat for p in profiles), max(p.c_hat for p in profiles)
        lod, hid = min(p.d_hat for p in profiles), max(p.d_hat for p in profiles)
        metric_samples = [
            (
                _minmax_scale(ps, lop, hip),
                _minmax_scale(cs, loc, hic),
                _minmax_scale(ds, lod, hid),
            )
            for (ps, cs, ds) in metric_samples
        ]

    utilities: list[SampledUtility] = []
    for profile, (ps, cs, ds) in zip(profiles, metric_samples):
        if config.greedy:
            x_p = math.fsum(ps) / len(ps)
            x_c = math.fsum(cs) / len(cs)
            x_d = math.fsum(ds) / len(ds)
        else:
            x_p = sample_metric(fit_nig(ps, config), rng)
            x_c = sample_metric(fit_nig(cs, config), rng)
            x_d = sample_metric(fit_nig(ds, config), rng)
        utilities.append(
            SampledUtility(
                model=profile.model,
                x_p=x_p,
                x_c=x_c,
                x_d=x_d,
                utility=utility_of(x_p, x_c, x_d, weights),
            )
        )

    best_idx = 0
    for i in range(1, len(profiles)):
        u, b = utilities[i], utilities[best_idx]
        if u.utility > b.utility:
            best_idx = i
        elif u.utility == b.utility:
            pi, pb = profiles[i], profiles[best_idx]
            if (pi.c_hat, pi.d_hat, pi.model) < (pb.c_hat, pb.d_hat, pb.model):
                best_idx = i
    return SelectionResult(
        model=profiles[best_idx].model,
        utilities=tuple(utilities),
        greedy=config.greedy,
    )
