"""Sufficient conditions for the summation formula with general weights.

For even non-decreasing weights ``u`` (space side) and ``v`` (Fourier side)
and scale sequences ``Delta``, ``Delta~`` the four quantities are

1. ``(sum_{k<=N} ||u^-1 phi((x-k) Delta_k)||_{p'}^{p'} Delta_k^{p'})^{1/p'}``
2. ``(sum_{k<N} v^{-q'}(Delta_k/2)(Delta_{k+1}-Delta_k)||D_k||_{q'}^{q'})^{1/q'}
   + (int_{Delta_N/2-1}^inf v^{-q'})^{1/q'} ||D_N||_{q'}``
3. as 1 with ``v``, ``Delta~`` and ``q'``
4. as 2 with ``u``, ``Delta~`` and ``p'``

Each is evaluated along a list of ``N`` and the verdict comes from log-log
slopes.  The density of Schwartz functions in the weighted space is a
hypothesis of the criterion that is not checked.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bump import BumpKernel, default_kernel
from .norms import CONSTANT, NON_DECREASING, WeightSpec, bump_weight_norms, partial_sum_norms
from .quadrature import NonIntegrableError
from .regime import INF, ParamPoint, conjugate, reciprocal, to_float

DEFAULT_GROWTH_THRESHOLD = 0.05
UNCHECKED_HYPOTHESIS = "density of Schwartz functions in the weighted space (not checked)"


def power_scales(B: float) -> Callable:
    """``k -> 1 + k^B``."""
    B = float(B)
    return lambda k: 1.0 + np.asarray(k, dtype=float) ** B


@dataclass(frozen=True)
class WeightPair:
    u: WeightSpec
    v: WeightSpec
    delta: Callable
    delta_tilde: Callable

    def __post_init__(self):
        for name in ("u", "v"):
            w = getattr(self, name)
            if w.direction not in (NON_DECREASING, CONSTANT):
                raise ValueError(f"weight {name} must be non-decreasing, got {w.direction}")

    def scales(self, N: int, tilde: bool = False) -> np.ndarray:
        d = np.asarray((self.delta_tilde if tilde else self.delta)(np.arange(N + 1)), dtype=float)
        if d[0] < 1 or np.any(np.diff(d) <= 0):
            raise ValueError("scale sequences must start at >= 1 and increase strictly")
        return d


class Verdict(enum.Enum):
    LIKELY_BOUNDED = "LikelyBounded"
    GROWING = "Growing"
    INCONCLUSIVE = "Inconclusive"


def _conj(e) -> float:
    return to_float(conjugate(e))


def _bump_condition(w: WeightSpec, r: float, d: np.ndarray, kernel) -> np.ndarray:
    """Running values of condition 1/3 for ``N = 0..len(d)-1``."""
    terms = bump_weight_norms(w.inverse(), r, d, kernel) * d
    if math.isinf(r):
        return np.maximum.accumulate(terms)
    return np.cumsum(terms ** r) ** (1.0 / r)


def dirichlet_norms(N: int, r: float) -> np.ndarray:
    """``||D_k||_{L^r(T)}`` for ``k = 0..N``."""
    if math.isinf(r):
        return 2.0 * np.arange(N + 1) + 1.0
    if r == 2:
        return np.sqrt(2.0 * np.arange(N + 1) + 1.0)
    # D_k is a unimodular factor times a block of 2k + 1 ones
    heads = partial_sum_norms(np.ones(2 * N + 1), r, "head")
    return heads[2 * np.arange(N + 1)]


def _dirichlet_condition(w: WeightSpec, r: float, d: np.ndarray, N: int) -> float:
    """Condition 2/4 at a single ``N`` (uses ``d[0..N]``)."""
    winv = w.inverse()
    D = dirichlet_norms(N, r)
    steps = np.diff(d[: N + 1])
    lo = d[N] / 2 - 1
    if math.isinf(r):
        body = float(np.max(winv(d[:N] / 2) * D[:N])) if N > 0 else 0.0
        tail = float(winv(np.array([max(lo, 0.0)]))[0]) * D[N]
        return body + tail
    body = math.fsum((winv(d[:N] / 2) ** r * steps * D[:N] ** r).tolist()) ** (1.0 / r) if N > 0 else 0.0
    tail = winv.power_integral(r, lo) ** (1.0 / r) * D[N]
    return body + tail


def corollary_supremum(pair: WeightPair, which: int, p, q, N_list: Sequence[int],
                       kernel: Optional[BumpKernel] = None) -> np.ndarray:
    """Value of condition ``which`` (1..4) at each ``N`` of ``N_list``.

    Raises :class:`~psflab.quadrature.NonIntegrableError` when a tail integral
    of the inverse weight diverges.
    """
    kernel = kernel or default_kernel()
    if which not in (1, 2, 3, 4):
        raise ValueError(f"which must be 1..4, got {which}")
    Ns = [int(n) for n in N_list]
    Nmax = max(Ns)
    pp, qp = _conj(p), _conj(q)
    tilde = which in (3, 4)
    d = pair.scales(Nmax, tilde)
    if which in (1, 3):
        w, r = (pair.u, pp) if which == 1 else (pair.v, qp)
        run = _bump_condition(w, r, d, kernel)
        return np.array([run[n] for n in Ns])
    w, r = (pair.v, qp) if which == 2 else (pair.u, pp)
    return np.array([_dirichlet_condition(w, r, d, n) for n in Ns])


def loglog_slope(N_list, values) -> float:
    x = np.log(np.asarray(N_list, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class WeightReport:
    verdict: Verdict
    slopes: tuple
    values: tuple
    diverging: tuple
    unchecked: str = UNCHECKED_HYPOTHESIS


def verdict(pair: WeightPair, p, q, N_list: Sequence[int],
            growth_threshold: float = DEFAULT_GROWTH_THRESHOLD,
            kernel: Optional[BumpKernel] = None) -> WeightReport:
    """Slope test on the four conditions.

    All slopes below the threshold give ``LikelyBounded``; any slope above
    twice the threshold, or a divergent tail integral, gives ``Growing``.
    """
    if len(N_list) < 4:
        raise ValueError("need at least four values of N")
    slopes, values, diverging = [], [], []
    for which in (1, 2, 3, 4):
        try:
            vals = corollary_supremum(pair, which, p, q, N_list, kernel)
        except NonIntegrableError:
            slopes.append(math.inf)
            values.append(None)
            diverging.append(which)
            continue
        values.append(tuple(float(v) for v in vals))
        slopes.append(loglog_slope(N_list, vals))
    if all(s < growth_threshold for s in slopes):
        tag = Verdict.LIKELY_BOUNDED
    elif any(s > 2 * growth_threshold for s in slopes):
        tag = Verdict.GROWING
    else:
        tag = Verdict.INCONCLUSIVE
    return WeightReport(tag, tuple(slopes), tuple(values), tuple(diverging))


def critical_scale_exponents(point: ParamPoint) -> tuple[float, float]:
    """``(1/q)/(beta - 1/q')`` and ``(alpha - 1/p')/(1/p)``.

    Scales ``1 + k^B`` with ``B`` strictly between them make the power-weight
    conditions summable; an infinite exponent removes the corresponding limit.
    """
    lower = float(reciprocal(point.q) / point.beta_excess)
    inv_p = reciprocal(point.p)
    upper = math.inf if inv_p == 0 else float(point.alpha_excess / inv_p)
    return lower, upper


def _rate_terms(point: ParamPoint) -> tuple[float, float, float, float]:
    """``(c1, s1, s2, c2)`` with summand decay margins ``c1 - s1 B`` and ``s2 B - c2``.

    For ``Delta_k = 1 + k^B`` and power weights the summands of the bump
    condition decay like ``k^{-1-(c1 - s1 B)}`` and those of the Dirichlet
    condition like ``k^{-1-(s2 B - c2)}``; sup forms (conjugate exponent
    infinite) use the exponent of the supremand instead.
    """
    a, b = point.alpha_excess, point.beta_excess
    pp, qp = conjugate(point.p), conjugate(point.q)
    if pp is INF:
        c1, s1 = float(a), 1.0
    else:
        c1, s1 = float(pp * a), float(pp * reciprocal(point.p))
    if qp is INF:
        s2, c2 = float(b), 1.0
    else:
        s2, c2 = float(qp * b), float(qp * reciprocal(point.q))
    return c1, s1, s2, c2


def balanced_scale_exponent(point: ParamPoint, max_B: float = 3.9) -> tuple[float, float]:
    """``(B, margin)``: the exponent that equalizes the two decay margins.

    Inside the regime ``B`` lies strictly between the critical exponents and
    the margin is positive; in the failing regime the margin is negative.
    """
    if not point.admissible:
        raise ValueError(f"{point} is not admissible")
    c1, s1, s2, c2 = _rate_terms(point)
    B = (c1 + c2) / (s1 + s2)
    B = min(max_B, max(B, 0.1))
    return B, min(c1 - s1 * B, s2 * B - c2)


def convergence_margin(point: ParamPoint, max_B: float = 3.9) -> tuple[float, float]:
    """``(margin, B)``: smallest decay margin of the four conditions at the
    balanced scales, and the smaller of the two balanced exponents."""
    B, m = balanced_scale_exponent(point, max_B)
    Bt, mt = balanced_scale_exponent(point.swapped(), max_B)
    return min(m, mt), min(B, Bt)


def power_weight_pair(point: ParamPoint, max_B: float = 3.9) -> WeightPair:
    """``u = (1+|x|)^alpha``, ``v = (1+|xi|)^beta`` with balanced scales ``1 + k^B``.

    ``Delta`` serves conditions 1 and 2, ``Delta~`` conditions 3 and 4 (the
    same construction at the swapped point).
    """
    B, _ = balanced_scale_exponent(point, max_B)
    Bt, _ = balanced_scale_exponent(point.swapped(), max_B)
    return WeightPair(WeightSpec.shifted(float(point.alpha)), WeightSpec.shifted(float(point.beta)),
                      power_scales(B), power_scales(Bt))
