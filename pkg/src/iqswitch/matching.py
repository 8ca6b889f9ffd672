"""Maximum-weight matchings on the queue matrix, with dual certificates.

The scheduler solves an assignment problem each slot: pick a permutation
pi maximizing sum_i q[i, pi(i)].  The solver also returns potentials
(w, w_tilde) that certify optimality: w_i + w_tilde_j >= q_ij everywhere,
tight on matched pairs, and summing to the matching weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ConfigError, SizeLimitExceeded
from .model import Schedule

BRUTE_FORCE_MAX_N = 8


@lru_cache(maxsize=None)
def _perm_table(n: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class MatchingResult:
    """Optimal permutation with its weight and dual certificate."""

    perm: np.ndarray
    weight: float
    w: np.ndarray
    w_tilde: np.ndarray

    @property
    def schedule(self) -> Schedule:
        return Schedule(self.perm)


def _check_input(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 1:
        raise ConfigError("weight matrix must be square and nonempty")
    if (q < 0).any():
        raise ConfigError("weights must be nonnegative")
    return q


def max_weight_matching(
    q, rng: np.random.Generator | None = None, tie_break: str = "shuffle"
) -> MatchingResult:
    """Solve the assignment problem on q, optionally randomizing ties.

    tie_break "shuffle" relabels rows and columns at random before
    solving, which randomizes among optima without enumerating them;
    "uniform" draws exactly uniformly from the argmax set (enumeration,
    so n <= 8); "none" is deterministic.  Without an rng the solve is
    deterministic regardless.
    """
    q = _check_input(q)
    n = q.shape[0]
    if tie_break not in ("none", "shuffle", "uniform"):
        raise ConfigError(f"unknown tie_break {tie_break!r}")
    if rng is None or tie_break == "none":
        perm, w, wt = _kernels.hungarian_dual(q)
        return MatchingResult(perm=perm, weight=float(q[np.arange(n), perm].sum()), w=w, w_tilde=wt)
    if tie_break == "uniform":
        weight, opts = brute_force_matching(q)
        perm = opts[rng.integers(0, opts.shape[0])]
        # any optimal permutation is tight against any optimal dual pair
        _, w, wt = _kernels.hungarian_dual(q)
        return MatchingResult(perm=perm.copy(), weight=weight, w=w, w_tilde=wt)
    rp = rng.permutation(n)
    cp = rng.permutation(n)
    sub_perm, sub_w, sub_wt = _kernels.hungarian_dual(q[np.ix_(rp, cp)])
    perm = np.empty(n, dtype=np.int64)
    perm[rp] = cp[sub_perm]
    w = np.empty(n)
    wt = np.empty(n)
    w[rp] = sub_w
    wt[cp] = sub_wt
    return MatchingResult(perm=perm, weight=float(q[np.arange(n), perm].sum()), w=w, w_tilde=wt)


def brute_force_matching(q) -> tuple[float, np.ndarray]:
    """Exhaustive assignment solve; returns (best weight, all argmax perms).

    Only for n <= BRUTE_FORCE_MAX_N; raises SizeLimitExceeded beyond.
    Weights of integer-valued inputs are compared exactly.
    """
    q = _check_input(q)
    n = q.shape[0]
    if n > BRUTE_FORCE_MAX_N:
        raise SizeLimitExceeded(f"exhaustive search capped at n={BRUTE_FORCE_MAX_N}")
    table = _perm_table(n)
    weights = q[np.arange(n)[None, :], table].sum(axis=1)
    best = weights.max()
    # integral inputs keep sums exact in float64, so ties compare exactly
    if np.array_equal(q, np.round(q)):
        mask = weights == best
    else:
        mask = weights >= best - 1e-12 * max(1.0, abs(best))
    return float(best), table[mask]


def argmax_set(q) -> np.ndarray:
    """All optimal permutations, one per row."""
    return brute_force_matching(q)[1]


def check_complementary_slackness(q, result: MatchingResult, tol: float = 1e-9) -> bool:
    """Verify the dual certificate of a matching result.

    Checks dual feasibility w_i + w_tilde_j >= q_ij - tol, tightness on
    the matched pairs, and strong duality |sum duals - weight| <= tol.
    """
    q = np.asarray(q, dtype=np.float64)
    n = q.shape[0]
    cover = result.w[:, None] + result.w_tilde[None, :]
    if (cover - q).min() < -tol:
        return False
    matched = q[np.arange(n), result.perm]
    covered = result.w + result.w_tilde[result.perm]
    if np.abs(matched - covered).max() > tol:
        return False
    return abs(result.w.sum() + result.w_tilde.sum() - result.weight) <= tol
