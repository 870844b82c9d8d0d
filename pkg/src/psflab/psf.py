"""Partial sums, smoothed sums, Dirichlet kernels and defect series.

Sums are accumulated with :func:`math.fsum`, which is exactly rounded; the
quantities of interest are small differences of nearly equal sums.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import zeta

from .bump import BumpKernel, default_kernel
from .regime import ParamPoint, PsfTag, classify_psf, conjugate, format_ext, gamma_exponent, to_float
from .stepfn import StepSpec, eval_F, eval_Fhat


class Provenance(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    STEP_SPEC = "StepSpec-derived"
    COMPOSITE = "Composite"


@dataclass(frozen=True)
class FunctionPair:
    """A function and its Fourier transform, both vectorized."""

    f: Callable
    fhat: Callable
    provenance: Provenance
    name: str = ""


def _fsum(values) -> complex | float:
    v = np.asarray(values)
    if np.iscomplexobj(v):
        return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))
    return math.fsum(v.astype(float).tolist())


def partial_sum(g: Callable, N: int):
    """``sum_{|k| <= N} g(k)``."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    k = np.arange(-N, N + 1, dtype=float)
    return _fsum(g(k))


def smoothed_sum(g: Callable, N: int, kernel: Optional[BumpKernel] = None):
    """``sum_k g(k) phihat(k/N)``; only ``|k| < N`` contribute."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    kernel = kernel or default_kernel()
    k = np.arange(-(N - 1), N, dtype=float)
    return _fsum(g(k) * kernel.phihat(k / N))


def weighted_sum_Q(f: Callable, c, gamma, N: int) -> float:
    """``N^-gamma sum_{k=0}^N c_k f(k)`` for a non-negative non-decreasing ``c``.

    ``c`` is a sequence with at least ``N + 1`` entries or a callable of ``k``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    k = np.arange(N + 1, dtype=float)
    ck = np.asarray(c(k) if callable(c) else c, dtype=float)[: N + 1]
    if ck.size < N + 1:
        raise ValueError(f"need {N + 1} coefficients, got {ck.size}")
    if np.any(ck < 0):
        raise ValueError("coefficients must be non-negative")
    if np.any(np.diff(ck) < 0):
        raise ValueError("coefficients must be non-decreasing")
    return float(_fsum(ck * f(k)).real) / N ** float(gamma)


def dirichlet(M: int, xi):
    """``D_M(xi) = sin(2 pi (M + 1/2) xi) / sin(pi xi)``, ``2M + 1`` at the integers."""
    if M < 0:
        raise ValueError(f"M must be >= 0, got {M}")
    xi = np.asarray(xi, dtype=float)
    # reduce to [-1/2, 1/2): D_M has period 1
    t = xi - np.round(xi)
    s = np.sin(np.pi * t)
    small = np.abs(t) < 1e-8
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 0.0, np.sin((2 * M + 1) * np.pi * t) / np.where(small, 1.0, s))
    if np.any(small):
        # Taylor expansion around the integers
        u = np.pi * t[small]
        n = 2 * M + 1
        out = np.array(out, dtype=float)
        out[small] = n * (1.0 - (n * n - 1) * u * u / 6.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DirichletTail:
    M: int
    N: int
    left: float
    right: float

    @property
    def ratio(self) -> float:
        return self.left / self.right


def dirichlet_tail_bound(M: int, N: int, beta, qprime, C: Optional[float] = None) -> DirichletTail:
    """Left side ``(int_{N/2}^inf |D_M|^{q'} xi^{-q' beta})^{1/q'}`` and ``M^{1/q} N^{-beta+1/q'}``.

    Periodicity turns the left side into
    ``int_0^1 |D_M(t)|^{q'} zeta(q' beta, N/2 + t) dt`` (Hurwitz zeta), which
    is integrated between consecutive zeros of ``D_M``.  With ``C`` given the
    inequality ``left <= C right`` is asserted.
    """
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    qp = to_float(qprime)
    q = to_float(conjugate(qprime))
    beta = float(beta)
    inv_qp = 0.0 if math.isinf(qp) else 1.0 / qp
    if beta <= inv_qp:
        raise ValueError(f"the tail diverges for beta = {beta} <= 1/q' = {inv_qp}")
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    right = M ** inv_q * N ** (-beta + inv_qp)
    a0 = N / 2.0
    if math.isinf(qp):
        # |D_M| peaks at integers where it equals 2M + 1
        xi = np.linspace(a0, a0 + 1.0, 64 * (2 * M + 1) + 1)
        xi = np.concatenate([xi, [math.ceil(a0)]])
        left = float(np.max(np.abs(dirichlet(M, xi)) * xi ** (-beta)))
    else:
        edges = np.arange(2 * M + 2) / (2 * M + 1)
        x, w = np.polynomial.legendre.leggauss(20)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wt = (half[:, None] * w[None, :]).ravel()
        vals = np.abs(dirichlet(M, t)) ** qp * zeta(qp * beta, a0 + t)
        left = math.fsum((vals * wt).tolist()) ** (1.0 / qp)
    res = DirichletTail(M, N, left, right)
    if C is not None:
        assert left <= C * right, f"Dirichlet tail {left:.6g} exceeds {C} x {right:.6g}"
    return res


# -- reference pairs ---------------------------------------------------------------


def gaussian_pair(t: float = 1.0) -> FunctionPair:
    """``e^{-pi t x^2}`` and ``t^{-1/2} e^{-pi xi^2 / t}``."""
    t = float(t)
    return FunctionPair(
        lambda x: np.exp(-np.pi * t * np.asarray(x, dtype=float) ** 2),
        lambda xi: np.exp(-np.pi * np.asarray(xi, dtype=float) ** 2 / t) / math.sqrt(t),
        Provenance.CLOSED_FORM,
        f"gaussian(t={t:g})",
    )


def perturbed_gaussian_pair(t: float = 1.0, lam: float = 0.0, shift: float = 0.0) -> FunctionPair:
    """``e^{-pi t x^2} (1 + lam x^2) cos(2 pi shift x)`` with its exact transform.

    Uses ``FT[x^2 e^{-pi x^2}] = (1/(2 pi) - xi^2) e^{-pi xi^2}`` and dilation.
    """
    t, lam, a = float(t), float(lam), float(shift)

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-np.pi * t * x * x) * (1.0 + lam * x * x) * np.cos(2 * np.pi * a * x)

    def base_hat(xi):
        g = np.exp(-np.pi * xi * xi / t) / math.sqrt(t)
        return g * (1.0 + lam / t * (1.0 / (2 * np.pi) - xi * xi / t))

    def fhat(xi):
        xi = np.asarray(xi, dtype=float)
        return 0.5 * (base_hat(xi - a) + base_hat(xi + a))

    return FunctionPair(f, fhat, Provenance.CLOSED_FORM,
                        f"gaussian(t={t:g},lam={lam:g},shift={a:g})")


def theta_sides(t: float, N: int) -> tuple[float, float]:
    """``sum_{|n|<=N} e^{-pi t n^2}`` and ``t^{-1/2} sum_{|n|<=N} e^{-pi n^2 / t}``."""
    pair = gaussian_pair(t)
    return partial_sum(pair.f, N), partial_sum(pair.fhat, N)


def step_pair(spec: StepSpec, kernel: Optional[BumpKernel] = None) -> FunctionPair:
    """``F`` and ``Fhat`` of a step spec; ``Fhat`` is real at the integers."""
    kernel = kernel or default_kernel()
    return FunctionPair(
        lambda x: eval_F(spec, kernel, x),
        lambda xi: np.real(eval_Fhat(spec, kernel, xi)),
        Provenance.STEP_SPEC,
        f"step(N={spec.N})",
    )


# -- defect series ------------------------------------------------------------------


@dataclass
class DefectSeries:
    """Rows ``(N, M, P_N f, P_M fhat, defect)`` with their metadata."""

    point: ParamPoint
    family: str
    seed: Optional[int]
    gamma: Fraction
    rows: list = field(default_factory=list)

    CSV_COLUMNS = ("N", "M", "P_N_f", "P_M_fhat", "defect", "gamma", "seed")

    def defects(self) -> np.ndarray:
        return np.array([r[4] for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for n, m, a, b, d in self.rows:
            w.writerow([n, m, repr(float(a)), repr(float(b)), repr(float(d)),
                        format_ext(self.gamma), "" if self.seed is None else self.seed])
        return buf.getvalue()


def _ceil_power(N: int, gamma: Fraction) -> int:
    """``ceil(N^gamma)`` in exact arithmetic for rational ``gamma``."""
    if gamma == 1:
        return N
    m = max(1, int(math.ceil(N ** float(gamma))))
    # correct a possible off-by-one from floating point: want the least m with m^den >= N^num
    num, den = gamma.numerator, gamma.denominator
    target = N ** num
    while m > 1 and (m - 1) ** den >= target:
        m -= 1
    while m ** den < target:
        m += 1
    return m


def psf_defect_series(pair: FunctionPair, point: ParamPoint, N_list: Sequence[int],
                      seed: Optional[int] = None, family: str = "") -> DefectSeries:
    """``P_N(f) - P_M(fhat)`` with ``M = ceil(N^gamma)`` on the equality surface, else ``M = N``."""
    tag = classify_psf(point).tag
    if tag is PsfTag.FAILS:
        raise ValueError(
            f"{point} is in the failing regime: there are functions in the space whose two "
            "sides converge to different limits, so a defect series proves nothing"
        )
    if tag is PsfTag.INADMISSIBLE:
        raise ValueError(f"{point} is not admissible: f and fhat need not be defined pointwise")
    gamma = gamma_exponent(point) if tag is PsfTag.CONDITIONAL_EQUALITY else Fraction(1)
    series = DefectSeries(point, family or pair.name, seed, gamma)
    for N in N_list:
        M = _ceil_power(int(N), gamma)
        a = partial_sum(pair.f, int(N))
        b = partial_sum(pair.fhat, M)
        a = a.real if isinstance(a, complex) else a
        b = b.real if isinstance(b, complex) else b
        series.rows.append((int(N), M, a, b, a - b))
    return series
