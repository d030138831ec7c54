"""Hot numeric kernels: the cosine scan over the knowledge base and the
pairwise Pareto dominance mask.

Both carry a numba @njit implementation and a pure-numpy fallback. The numpy
path is forced with EVOROUTE_NUMBA=0 (useful where JIT compilation is
unwanted); otherwise numba is used when importable. `benchmarks/bench_kernels.py`
compares the two paths.

The two backends may disagree in the last ulp of a score (different summation
order); threshold comparisons are only guaranteed stable within one backend.
"""

from __future__ import annotations

import os

import numpy as np

# Scores this close to 1 are snapped to exactly 1.0: cosine of a vector with
# itself must survive a `>= 1.0` threshold despite float rounding.
_ONE_SNAP = 1e-12


def _cosine_scores_py(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    # rows of `matrix` and `query` are unit-norm; dot products are cosines
    n, d = matrix.shape
    out = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += matrix[i, j] * query[j]
        out[i] = s
    return out


def _pareto_keep_py(perf: np.ndarray, cost: np.ndarray, dur: np.ndarray) -> np.ndarray:
    n = perf.shape[0]
    keep = np.ones(n, dtype=np.bool_)
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            if (
                perf[i] >= perf[j]
                and cost[i] <= cost[j]
                and dur[i] <= dur[j]
                and (perf[i] > perf[j] or cost[i] < cost[j] or dur[i] < dur[j])
            ):
                keep[j] = False
                break
    return keep


def cosine_scores_numpy(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    return matrix @ query


def pareto_keep_numpy(perf: np.ndarray, cost: np.ndarray, dur: np.ndarray) -> np.ndarray:
    ge_p = perf[:, None] >= perf[None, :]
    le_c = cost[:, None] <= cost[None, :]
    le_d = dur[:, None] <= dur[None, :]
    strict = (perf[:, None] > perf[None, :]) | (cost[:, None] < cost[None, :]) | (
        dur[:, None] < dur[None, :]
    )
    dominated = (ge_p & le_c & le_d & strict).any(axis=0)
    return ~dominated


def _numba_enabled() -> bool:
    flag = os.environ.get("EVOROUTE_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USING_NUMBA = _numba_enabled()

if USING_NUMBA:
    from numba import njit

    cosine_scores_numba = njit(cache=True)(_cosine_scores_py)
    pareto_keep_numba = njit(cache=True)(_pareto_keep_py)
    cosine_scores = cosine_scores_numba
    pareto_keep = pareto_keep_numba
else:
    cosine_scores = cosine_scores_numpy
    pareto_keep = pareto_keep_numpy


def snap_scores(scores: np.ndarray) -> np.ndarray:
    """Clamp cosine scores into [-1, 1], snapping near-1 values to exactly 1."""
    scores = np.clip(scores, -1.0, 1.0)
    scores[scores >= 1.0 - _ONE_SNAP] = 1.0
    return scores
