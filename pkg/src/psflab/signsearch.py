"""Random sign choices that make head sums behave like their L2 norms.

For coefficients ``c`` and weights ``w`` the objective is

    (sum_k w_k ||S_k||_q^q)^{1/q},   S_k(t) = sum_{j<=k} e_j c_j e^{-2 pi i j t}.

An average over signs is at most ``B_q`` times the L2 baseline (Khintchine),
so a random draw is typically good; a greedy flip pass polishes the best draw.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from .norms import _pow2_at_least
from .regime import to_float

EXHAUSTIVE_MAX = 20


def khintchine_constant(q: float) -> float:
    """``B_q = (E|g|^q)^{1/q}`` for a standard Gaussian ``g``; sharp upper constant for ``q >= 2``."""
    q = float(q)
    return (2 ** (q / 2) * gamma_fn((q + 1) / 2) / math.sqrt(math.pi)) ** (1.0 / q)


@dataclass(frozen=True, eq=False)
class SignSearchProblem:
    c: np.ndarray
    w: np.ndarray
    q: float
    trials: int = 256
    seed: int = 0

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        w = np.asarray(self.w, dtype=float).ravel()
        if c.size == 0 or c.size != w.size:
            raise ValueError("c and w must be non-empty and of equal length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "q", to_float(self.q))


class _HeadSums:
    """Batched ``sum_k w_k mean_t |S_k(t)|^q`` on a fixed grid of ``t``."""

    def __init__(self, problem: SignSearchProblem):
        self.p = problem
        n = problem.c.size
        q = problem.q
        if math.isinf(q):
            rows = _pow2_at_least(max(32 * n, 64))
        else:
            rows = _pow2_at_least(max(8 * n, 64, int(q * n / 2) + 2))
        t = np.arange(rows) / rows
        self.E = np.exp(-2j * np.pi * np.outer(t, np.arange(n))) * problem.c

    def power_sums(self, signs: np.ndarray) -> np.ndarray:
        """``sum_k w_k ||S_k||_q^q`` for each row of ``signs`` (shape ``(m, n)``)."""
        q = self.p.q
        out = np.empty(signs.shape[0])
        for i, s in enumerate(signs):
            S = np.abs(np.cumsum(self.E * s, axis=1))
            out[i] = float(self.p.w @ np.mean(S ** q, axis=0))
        return out


def khintchine_objective(signs, problem: SignSearchProblem) -> float:
    """``(sum_k w_k ||S_k||_q^q)^{1/q}`` for the signed coefficients."""
    q = problem.q
    if math.isinf(q):
        raise ValueError("the objective needs a finite q")
    s = np.asarray(signs, dtype=float).reshape(1, -1)
    return float(_HeadSums(problem).power_sums(s)[0]) ** (1.0 / q)


def l2_baseline(problem: SignSearchProblem) -> float:
    """``(sum_k w_k ||S_k||_2^q)^{1/q}``; sign independent."""
    q = problem.q
    heads = np.sqrt(np.cumsum(problem.c ** 2))
    return math.fsum((problem.w * heads ** q).tolist()) ** (1.0 / q)


@dataclass(frozen=True)
class SignSearchResult:
    signs: np.ndarray
    objective: float
    baseline: float
    trial_objectives: np.ndarray
    mode: str

    @property
    def ratio(self) -> float:
        return self.objective / self.baseline


def random_signs(n: int, trials: int, seed: int) -> np.ndarray:
    """One independent stream per trial so that results do not depend on batching."""
    children = np.random.SeedSequence(seed).spawn(trials)
    return np.stack([
        np.where(np.random.default_rng(ch).integers(0, 2, n) == 1, 1.0, -1.0) for ch in children
    ])


def search_signs(problem: SignSearchProblem, exhaustive: bool = False,
                 greedy: bool = True) -> SignSearchResult:
    """Best of ``trials`` random draws followed by one greedy flip pass.

    ``exhaustive=True`` enumerates all sign vectors with ``e_0 = +1`` (the
    objective is invariant under a global flip); only for ``N + 1 <= 21``.
    """
    q = problem.q
    if math.isinf(q):
        raise ValueError("use salem_zygmund_check for q = inf")
    n = problem.c.size
    hs = _HeadSums(problem)
    base = l2_baseline(problem)
    if exhaustive:
        if n - 1 > EXHAUSTIVE_MAX:
            raise ValueError(f"exhaustive mode is limited to N <= {EXHAUSTIVE_MAX}")
        return _exhaustive(problem, hs, base)
    draws = random_signs(n, problem.trials, problem.seed)
    vals = hs.power_sums(draws)
    best = int(np.argmin(vals))  # first index among ties
    signs = draws[best].copy()
    cur = float(vals[best])
    if greedy:
        for k in range(n):
            signs[k] = -signs[k]
            v = float(hs.power_sums(signs[None, :])[0])
            if v < cur:
                cur = v
            else:
                signs[k] = -signs[k]
    return SignSearchResult(signs, cur ** (1.0 / q), base, vals ** (1.0 / q), "random+greedy")


def _exhaustive(problem, hs: _HeadSums, base) -> SignSearchResult:
    q = problem.q
    n = problem.c.size
    best_val, best_signs = math.inf, None
    all_vals = []
    batch = 1024
    tails = itertools.product((1.0, -1.0), repeat=n - 1)
    while True:
        chunk = list(itertools.islice(tails, batch))
        if not chunk:
            break
        signs = np.hstack([np.ones((len(chunk), 1)), np.array(chunk)])
        # vectorized over the chunk: (m, rows, n)
        S = np.abs(np.cumsum(hs.E[None, :, :] * signs[:, None, :], axis=2))
        vals = np.mean(S ** q, axis=1) @ problem.w
        all_vals.append(vals)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_signs = float(vals[i]), signs[i].copy()
    vals = np.concatenate(all_vals)
    return SignSearchResult(best_signs, best_val ** (1.0 / q), base, vals ** (1.0 / q), "exhaustive")


def expectation_ratio(problem: SignSearchProblem, draws: int = 64) -> float:
    """``mean_e objective^q / (B_q^q baseline^q)`` over seeded random draws."""
    q = problem.q
    signs = random_signs(problem.c.size, draws, problem.seed)
    vals = _HeadSums(problem).power_sums(signs)
    return float(np.mean(vals)) / (khintchine_constant(q) ** q * l2_baseline(problem) ** q)


@dataclass(frozen=True)
class SalemZygmund:
    signs: np.ndarray
    ratios: np.ndarray

    @property
    def worst(self) -> float:
        return float(np.max(self.ratios))


def _sup_grid(n: int) -> np.ndarray:
    rows = _pow2_at_least(max(32 * n, 64))
    t = np.arange(rows) / rows
    return np.exp(-2j * np.pi * np.outer(t, np.arange(n)))


def sup_ratios(c, signs, grid: Optional[np.ndarray] = None) -> np.ndarray:
    """``||S_k||_inf / (sqrt(log(k+2)) ||S_k||_2)`` for every ``k`` (sampled sup)."""
    cs = np.asarray(c, dtype=float) * np.asarray(signs, dtype=float)
    n = cs.size
    E = _sup_grid(n) if grid is None else grid
    sup = np.max(np.abs(np.cumsum(E * cs, axis=1)), axis=0)
    l2 = np.sqrt(np.cumsum(cs ** 2))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = sup / (np.sqrt(np.log(np.arange(n) + 2.0)) * l2)
    return np.where(l2 > 0, r, 0.0)


def salem_zygmund_check(c, trials: int = 64, seed: int = 0,
                        signs: Optional[np.ndarray] = None) -> SalemZygmund:
    """Signs minimizing the worst sup-to-L2 ratio over ``trials`` seeded draws."""
    c = np.asarray(c, dtype=float).ravel()
    if c.size < 2:
        raise ValueError("need at least two coefficients")
    grid = _sup_grid(c.size)
    if signs is not None:
        return SalemZygmund(np.asarray(signs, dtype=float), sup_ratios(c, signs, grid))
    best = None
    for s in random_signs(c.size, trials, seed):
        r = sup_ratios(c, s, grid)
        if best is None or np.max(r) < np.max(best.ratios):
            best = SalemZygmund(s, r)
    return best
