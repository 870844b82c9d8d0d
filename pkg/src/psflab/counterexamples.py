"""Parameter families of step functions that witness failure of the summation formula.

Every constructor re-derives its exponents from the parameter point and
checks the identities that hold on the relevant boundary surface, rather than
accepting exponents from the caller.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.special import zeta

from .bump import BumpKernel, default_kernel
from .norms import _bump_offsets
from .psf import FunctionPair, Provenance
from .quadrature import integrate
from .regime import (
    INF,
    AbsTag,
    ParamPoint,
    PsfTag,
    classify_abs,
    classify_psf,
    reciprocal,
)
from .stepfn import StepSpec, eval_F, eval_Fhat, integer_values

SCHEDULE_CAP = 10 ** 7


class Support(enum.Enum):
    FULL = "Full"
    SQRT_WINDOW = "SqrtWindow"


@dataclass(frozen=True)
class FamilyParams:
    """Exponents of a family: ``A = beta/(beta - 1/q')``, ``B = (alpha - 1/p') p``."""

    point: ParamPoint
    A: Fraction
    B: Fraction
    p_sharp: int = 0
    support: Support = Support.FULL

    def as_dict(self) -> dict:
        return {"point": str(self.point), "A": str(self.A), "B": str(self.B),
                "p_sharp": self.p_sharp, "support": self.support.value}


def _exponents(point: ParamPoint) -> tuple[Fraction, Fraction]:
    if not point.admissible:
        raise ValueError(f"{point} is not admissible")
    A = point.beta / point.beta_excess
    assert A > 1
    if point.p is INF:
        raise ValueError("these families need a finite p")
    B = point.alpha_excess / reciprocal(point.p)
    return A, B


def _log_scales(n: np.ndarray, A: float, B: float) -> np.ndarray:
    """``(k+1)^B log(k+2)^(A-1)``, floored at 1 so the first scale is admissible."""
    return np.maximum(1.0, (n + 1.0) ** B * np.log(n + 2.0) ** (A - 1.0))


def _signs(signs, n: int) -> np.ndarray:
    if signs is None:
        return np.ones(n)
    s = np.asarray(signs, dtype=float).ravel()
    if s.size < n:
        raise ValueError(f"need {n} signs, got {s.size}")
    s = s[:n]
    if not np.all(np.abs(s) == 1):
        raise ValueError("signs must be +1 or -1")
    return s


def mainth3_params(point: ParamPoint) -> FamilyParams:
    if classify_psf(point).tag is not PsfTag.CONDITIONAL_EQUALITY:
        raise ValueError(f"{point} is not on the conditional-equality surface")
    A, B = _exponents(point)
    assert B == reciprocal(point.q) / point.beta_excess, "equality-surface identity violated"
    return FamilyParams(point, A, B)


def mainth3_family(point: ParamPoint, N: int) -> StepSpec:
    """``c_k = (k+1)^{-1-B} log(k+2)^{-A}``, ``Delta_k = (k+1)^B log(k+2)^{A-1}``."""
    fp = mainth3_params(point)
    A, B = float(fp.A), float(fp.B)
    n = np.arange(N + 1, dtype=float)
    c = (n + 1.0) ** (-1.0 - B) * np.log(n + 2.0) ** (-A)
    return StepSpec(c, _log_scales(n, A, B))


def extkah2_params(point: ParamPoint) -> FamilyParams:
    if point.q is INF or point.q <= 2:
        raise ValueError("this family needs a finite q > 2")
    if classify_abs(point) is AbsTag.INADMISSIBLE:
        raise ValueError(f"{point} is not admissible")
    A, B = _exponents(point)
    if B != Fraction(1, 2) / point.beta_excess:
        raise ValueError(
            f"{point} is off the surface (alpha - 1/p')(beta - 1/q') = 1/(2p): "
            f"B = {B} but (1/2)/(beta - 1/q') = {Fraction(1, 2) / point.beta_excess}"
        )
    return FamilyParams(point, A, B)


def extkah2_family(point: ParamPoint, N: int, signs=None) -> StepSpec:
    """Signed ``c_k = e_k (1+k)^{-1-B} log(k+2)^{-A}`` with the same scales as the main family."""
    fp = extkah2_params(point)
    A, B = float(fp.A), float(fp.B)
    n = np.arange(N + 1, dtype=float)
    c = _signs(signs, N + 1) * (n + 1.0) ** (-1.0 - B) * np.log(n + 2.0) ** (-A)
    return StepSpec(c, _log_scales(n, A, B))


def extkah2_qinf_params(point: ParamPoint) -> FamilyParams:
    if point.q is not INF:
        raise ValueError("this family needs q = inf")
    if not point.beta > 1:
        raise ValueError("this family needs beta > 1")
    A, B = _exponents(point)
    if B != Fraction(1, 2) / (point.beta - 1):
        raise ValueError(f"{point} is off the surface (alpha - 1/p')(beta - 1) = 1/(2p)")
    p_sharp = 1 if point.p == 1 else 0
    return FamilyParams(point, A, B, p_sharp, Support.SQRT_WINDOW)


def extkah2_qinf_family(point: ParamPoint, N: int, signs=None) -> StepSpec:
    """``c_k = e_k (1+k)^{-1-B}`` on ``sqrt(N) <= k <= N``, ``Delta_k = 1 + (1+k)^B (log N)^e``."""
    fp = extkah2_qinf_params(point)
    if N < 2:
        raise ValueError("N must be at least 2")
    B = float(fp.B)
    e = fp.p_sharp / (4.0 * float(point.beta - 1))
    n = np.arange(N + 1, dtype=float)
    lo = math.isqrt(N)
    if lo * lo < N:
        lo += 1
    c = np.where(n >= lo, _signs(signs, N + 1) * (n + 1.0) ** (-1.0 - B), 0.0)
    d = 1.0 + (n + 1.0) ** B * math.log(N) ** e
    return StepSpec(c, d)


def absolute_mass(spec: StepSpec) -> float:
    """``sum_k |c_k| Delta_k``, the limit of ``P_M(|F|)`` up to the factor ``phi(0)``."""
    return math.fsum((np.abs(spec.c) * spec.delta).tolist())


# -- composite function ------------------------------------------------------------


def default_schedule(J: int) -> list[int]:
    """``ceil(exp(exp(j)))`` for ``j = 1..J``, capped at 10^7."""
    out = []
    for j in range(1, J + 1):
        e = math.exp(j)
        n = SCHEDULE_CAP if e > math.log(SCHEDULE_CAP) else math.ceil(math.exp(e))
        out.append(min(n, SCHEDULE_CAP))
    if len(set(out)) < len(out):
        raise ValueError(f"J = {J} exceeds what the capped schedule can separate")
    if out[-1] == SCHEDULE_CAP:
        warnings.warn("schedule capped at 10^7; the alternation is only qualitatively visible",
                      stacklevel=2)
    return out


@dataclass
class DiagonalFunction:
    """``f = sum_j (-1)^j j^-2 F_{N_j} / (log log N_j)^{1/q}``."""

    point: ParamPoint
    schedule: list
    specs: list
    weights: np.ndarray
    term_bounds: list = field(default_factory=list)
    pair: Optional[FunctionPair] = None
    _integer_cache: Optional[list] = field(default=None, repr=False)

    def sums_at(self, M: int, kernel: Optional[BumpKernel] = None) -> float:
        """``sum_{|n|<=M} f(n)``."""
        kernel = kernel or default_kernel()
        if self._integer_cache is None:
            self._integer_cache = [integer_values(spec, kernel) for spec in self.specs]
        parts = []
        for w, (n, vals) in zip(self.weights, self._integer_cache):
            sel = (n >= -M) & (n <= M)
            parts.append(w * math.fsum(vals[sel].tolist()))
        return math.fsum(parts)

    def schedule_sums(self, kernel: Optional[BumpKernel] = None) -> list:
        return [self.sums_at(N, kernel) for N in self.schedule]


def diagonal_function(point: ParamPoint, J: int, schedule: Optional[Sequence[int]] = None,
                      kernel: Optional[BumpKernel] = None) -> DiagonalFunction:
    kernel = kernel or default_kernel()
    schedule = list(default_schedule(J) if schedule is None else schedule)
    if len(schedule) < J:
        raise ValueError(f"schedule has {len(schedule)} entries, need {J}")
    schedule = schedule[:J]
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing")
    if schedule[0] < 3:
        raise ValueError("schedule entries must be >= 3 so that log log N > 0")
    mainth3_params(point)  # rejects points off the equality surface
    inv_q = float(reciprocal(point.q))
    specs, weights, bounds = [], [], []
    for j, N in enumerate(schedule, start=1):
        spec = mainth3_family(point, N)
        specs.append(spec)
        weights.append((-1) ** j / j ** 2 / math.log(math.log(N)) ** inv_q)
        bounds.append({"N": N, "absolute_mass": absolute_mass(spec)})
    weights = np.array(weights)

    def f(x):
        return sum(w * eval_F(s, kernel, x) for w, s in zip(weights, specs))

    def fhat(xi):
        return sum(w * np.real(eval_Fhat(s, kernel, xi)) for w, s in zip(weights, specs))

    pair = FunctionPair(f, fhat, Provenance.COMPOSITE, f"diagonal(J={J})")
    return DiagonalFunction(point, schedule, specs, weights, bounds, pair)


# -- the p = q = 1 positive case ------------------------------------------------------


@dataclass(frozen=True)
class AbsoluteMajorant:
    lhs: float
    fourier_part: float
    local_part: float

    @property
    def majorant(self) -> float:
        return self.fourier_part + self.local_part


def pq11_absolute_bound(pair: FunctionPair, alpha, N: int,
                        kernel: Optional[BumpKernel] = None) -> AbsoluteMajorant:
    """Two-part majorant of ``sum_{|n|<=N} |f(n)|`` with scales ``Delta_n = max(1,|n|)^alpha``.

    ``f(n)`` is split into ``f(n) - <f, Delta_n phi(Delta_n(. - n))>`` (controlled by
    ``int |fhat| sum_n |1 - phihat(xi/Delta_n)|``) and the local average (controlled by
    ``int |f| sum_n Delta_n |phi(Delta_n (x - n))|``).
    """
    if pair.provenance not in (Provenance.CLOSED_FORM, Provenance.STEP_SPEC):
        raise ValueError("needs a pair with an exactly evaluable transform")
    kernel = kernel or default_kernel()
    a = float(alpha)
    n = np.arange(-N, N + 1)
    d = np.maximum(1.0, np.abs(n).astype(float)) ** a
    lhs = math.fsum(np.abs(pair.f(n.astype(float))).tolist())

    def k1(xi):
        return np.sum(1.0 - kernel.phihat(np.asarray(xi)[:, None] / d[None, :]), axis=1)

    ud = np.unique(d)
    bps = np.unique(np.concatenate([ud / 2, ud, -ud / 2, -ud, [0.0]]))
    four, _ = integrate(lambda x: np.abs(pair.fhat(x)) * k1(x),
                        np.concatenate([[-math.inf], bps, [math.inf]]), tol=1e-13, rtol=1e-10)

    def k2(x):
        x = np.asarray(x, dtype=float)
        return np.abs(kernel.phi((x[:, None] - n[None, :]) * d[None, :])) @ d

    reach = kernel.xmax / d
    lo = float(np.min(n - reach))
    hi = float(np.max(n + reach))
    pts = [np.array([lo, hi])]
    for j in range(n.size):
        o = n[j] + _bump_offsets(24.0, 24.0) / d[j]
        pts.append(o)
    pts = np.unique(np.concatenate(pts))
    pts = pts[(pts >= lo) & (pts <= hi)]
    local, _ = integrate(lambda x: np.abs(pair.f(x)) * k2(x), pts, tol=1e-13, rtol=1e-10)
    res = AbsoluteMajorant(lhs, four, local)
    assert lhs <= res.majorant * (1 + 1e-9) + 1e-300, "absolute sum exceeds its majorant"
    return res


def kernel_sum(xi, alpha, M: int) -> np.ndarray:
    """``sum_{n>=1} min(1, (xi/n^alpha)^M)`` in closed form via the Hurwitz zeta function."""
    a = float(alpha)
    if a * M <= 1:
        raise ValueError("the kernel sum diverges unless alpha M > 1")
    xi = np.abs(np.asarray(xi, dtype=float))
    n0 = np.floor(xi ** (1.0 / a))
    # n <= n0 contribute 1 each (up to rounding of n0 itself)
    n0 = np.where((n0 + 1.0) ** a <= xi, n0 + 1.0, n0)
    return n0 + xi ** M * zeta(a * M, n0 + 1.0)


def kernel_sum_ratio(xi, alpha, M: int) -> np.ndarray:
    """``kernel_sum / |xi|^{1/alpha}``; bounded above by a constant."""
    xi = np.asarray(xi, dtype=float)
    return kernel_sum(xi, alpha, M) / np.abs(xi) ** (1.0 / float(alpha))
