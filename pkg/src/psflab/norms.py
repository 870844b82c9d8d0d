"""Weighted norms on the line and the torus, and coefficient-side majorants.

Line norms are computed by adaptive Gauss-Kronrod quadrature.  Norms of
``Fhat`` and ``Ghat`` need a dedicated scheme because these functions
oscillate with period one out to ``|xi| ~ max Delta`` (up to ~1e8 here):
writing ``xi = m + t`` the phases ``e^{-2 pi i k xi}`` depend on ``t`` only,
so for each node ``t_i`` of a periodic grid the sum over cells ``m`` is a
sum of a slowly varying function and is done by midpoint Euler-Maclaurin.
The whole procedure is the trapezoid rule on the line with step ``1/L``,
evaluated without visiting every node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bump import BumpKernel, default_kernel
from .quadrature import NonIntegrableError, gauss_legendre_panels, integrate, tail_integral
from .regime import to_float
from .stepfn import StepSpec, eval_F, window_radii

NON_DECREASING = "non-decreasing"
NON_INCREASING = "non-increasing"
CONSTANT = "constant"


# -- weights ---------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSpec:
    """Even weight on the line.

    ``kind`` is ``"power"`` (``|x|^a``), ``"shifted"`` (``(1+|x|)^a``) or
    ``"general"``; general weights carry an evaluator for ``x >= 0`` and must
    declare their monotone direction on ``[0, inf)``.
    """

    kind: str
    exponent: float = 0.0
    name: str = ""
    func: Optional[Callable] = None
    declared_direction: Optional[str] = None
    factor: float = 1.0

    def __post_init__(self):
        if self.kind not in ("power", "shifted", "general"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "general":
            if self.func is None:
                raise ValueError("general weight needs an evaluator")
            if self.declared_direction not in (NON_DECREASING, NON_INCREASING, CONSTANT):
                raise ValueError("general weight must declare its monotone direction")
        if not self.factor > 0:
            raise ValueError("weight factor must be positive")

    @classmethod
    def power(cls, a) -> "WeightSpec":
        return cls("power", float(a), name=f"|x|^{a}")

    @classmethod
    def shifted(cls, a) -> "WeightSpec":
        return cls("shifted", float(a), name=f"(1+|x|)^{a}")

    @classmethod
    def constant(cls) -> "WeightSpec":
        return cls("shifted", 0.0, name="1")

    @classmethod
    def general(cls, name, func, direction) -> "WeightSpec":
        return cls("general", 0.0, name=name, func=func, declared_direction=direction)

    @classmethod
    def from_table(cls, x, values, name: str = "table") -> "WeightSpec":
        """Piecewise log-linear weight through ``(x_i, w_i)``, ``x_0 = 0``.

        Beyond the last node the weight continues as the power law through the
        last two nodes, so tail integrals stay meaningful.
        """
        x = np.asarray(x, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.size < 2 or x.size != v.size:
            raise ValueError("need at least two nodes of matching length")
        if x[0] != 0 or np.any(np.diff(x) <= 0) or np.any(v <= 0):
            raise ValueError("nodes must start at 0 and increase, values must be positive")
        dv = np.diff(v)
        if np.all(dv == 0):
            direction = CONSTANT
        elif np.all(dv >= 0):
            direction = NON_DECREASING
        elif np.all(dv <= 0):
            direction = NON_INCREASING
        else:
            raise ValueError("tabulated weight is not monotone")
        logv = np.log(v)
        slope = (logv[-1] - logv[-2]) / math.log(x[-1] / x[-2]) if x[-2] > 0 else 0.0
        xe, ve = x[-1], v[-1]

        def func(a):
            a = np.asarray(a, dtype=float)
            inside = np.exp(np.interp(np.minimum(a, xe), x, logv))
            with np.errstate(divide="ignore", invalid="ignore"):
                outside = ve * (np.maximum(a, xe) / xe) ** slope
            return np.where(a <= xe, inside, outside)

        return cls.general(name, func, direction)

    @classmethod
    def parse(cls, text: str) -> "WeightSpec":
        """``pow:a`` for ``(1+|x|)^a``, ``abs:a`` for ``|x|^a``, ``const`` for 1.

        ``file:path`` reads two whitespace-separated columns ``x w(x)`` for
        :meth:`from_table`.
        """
        text = text.strip()
        if text == "const":
            return cls.constant()
        kind, _, val = text.partition(":")
        if kind == "file":
            data = np.loadtxt(val, ndmin=2)
            return cls.from_table(data[:, 0], data[:, 1], name=val)
        a = float(to_float(val))
        if kind == "pow":
            return cls.shifted(a)
        if kind == "abs":
            return cls.power(a)
        raise ValueError(f"cannot parse weight {text!r}")

    @property
    def direction(self) -> str:
        if self.kind == "general":
            return self.declared_direction
        if self.exponent == 0:
            return CONSTANT
        return NON_DECREASING if self.exponent > 0 else NON_INCREASING

    def scaled(self, factor: float) -> "WeightSpec":
        return WeightSpec(self.kind, self.exponent, self.name, self.func,
                          self.declared_direction, self.factor * factor)

    def inverse(self) -> "WeightSpec":
        """``1/w``; monotone direction flips."""
        if self.kind == "general":
            flip = {NON_DECREASING: NON_INCREASING, NON_INCREASING: NON_DECREASING,
                    CONSTANT: CONSTANT}[self.declared_direction]
            f = self.func
            return WeightSpec("general", 0.0, f"1/({self.name})", lambda x: 1.0 / f(x), flip,
                              1.0 / self.factor)
        return WeightSpec(self.kind, -self.exponent, f"1/({self.name})", factor=1.0 / self.factor)

    def __call__(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            if self.kind == "power":
                v = a ** self.exponent if self.exponent != 0 else np.ones_like(a)
            elif self.kind == "shifted":
                v = (1.0 + a) ** self.exponent
            else:
                v = np.asarray(self.func(a), dtype=float)
        return self.factor * v

    def derivative_bound(self, lo: float, hi: float) -> float:
        """``sup |w'|`` on ``[lo, hi]`` for power-type weights (used for sup-norm moduli)."""
        if self.kind == "general":
            raise ValueError("no derivative bound for general weights")
        a = self.exponent
        if a == 0:
            return 0.0
        r = np.linspace(lo, hi, 2049)
        base = np.abs(r) if self.kind == "power" else 1.0 + np.abs(r)
        with np.errstate(divide="ignore"):
            return float(self.factor * np.max(np.abs(a) * base ** (a - 1)))

    def power_integral(self, r: float, lo: float, hi: float = math.inf) -> float:
        """``int_lo^hi w(x)^r dx``; raises :class:`NonIntegrableError` on divergence."""
        if hi <= lo:
            return 0.0
        if self.kind == "general":
            return _general_power_integral(self, r, lo, hi)
        e = self.exponent * r
        scale = self.factor ** r
        return scale * (_odd_antiderivative(self.kind, e, hi) - _odd_antiderivative(self.kind, e, lo))


def _odd_antiderivative(kind, e, x):
    """Antiderivative of ``(1+|x|)^e`` or ``|x|^e`` that is odd in ``x``."""
    if kind == "shifted":
        if math.isinf(x):
            if e >= -1:
                raise NonIntegrableError(f"(1+|x|)^{e} is not integrable at infinity")
            return math.copysign(-1.0 / (e + 1), x)
        a = abs(x)
        v = math.log1p(a) if e == -1 else ((1.0 + a) ** (e + 1) - 1.0) / (e + 1)
        return math.copysign(v, x)
    if math.isinf(x):
        if e >= -1:
            raise NonIntegrableError(f"|x|^{e} is not integrable at infinity")
        return 0.0
    if e <= -1:
        if x == 0:
            raise NonIntegrableError(f"|x|^{e} is not integrable at 0")
        return math.copysign(abs(x) ** (e + 1) / (e + 1), x) if e != -1 else math.copysign(math.log(abs(x)), x)
    return math.copysign(abs(x) ** (e + 1) / (e + 1), x)


def _general_power_integral(w, r, lo, hi):
    f = lambda x: w(x) ** r
    pieces = []
    if math.isinf(hi):
        start = max(lo, 1.0)
        if lo < start:
            pieces.append(integrate(f, sorted({lo, start} | ({0.0} if lo < 0 < start else set())),
                                    tol=1e-13, rtol=1e-11)[0])
        pieces.append(tail_integral(f, start))
        return math.fsum(pieces)
    pts = sorted({lo, hi} | ({0.0} if lo < 0 < hi else set()))
    return integrate(f, pts, tol=1e-13, rtol=1e-11)[0]


# -- results ------------------------------------------------------------------------


@dataclass(frozen=True)
class NormResult:
    value: float
    abs_error: float
    method: str
    certified: bool = True

    def __float__(self):
        return self.value

    def as_dict(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error, "method": self.method,
                "certified": self.certified}


def _as_exponent(p) -> float:
    v = to_float(p)
    if v < 1:
        raise ValueError(f"Lebesgue exponent must be >= 1, got {p}")
    return v


# -- line norms ------------------------------------------------------------------------


def line_norm(f, p, w: Optional[WeightSpec] = None, domain=(-math.inf, math.inf),
              tol: float = 1e-12, rtol: float = 1e-10, breakpoints=(), lipschitz=None,
              samples: int = 8193) -> NormResult:
    """``||f w||_p`` over ``domain``.

    Parameters
    ----------
    f : callable
        Vectorized function of ``x``.
    p : exponent in ``[1, inf]``
    lipschitz : float, optional
        Modulus of ``|f w|`` on the domain; certifies the ``p = inf`` result.
    """
    p = _as_exponent(p)
    w = w or WeightSpec.constant()
    lo, hi = float(domain[0]), float(domain[1])
    pts = {lo, hi}
    pts.update(float(b) for b in breakpoints if lo < b < hi)
    if lo < 0 < hi:
        pts.add(0.0)
    pts = sorted(pts)

    if math.isinf(p):
        if math.isinf(lo) or math.isinf(hi):
            raise ValueError("sup norms need a bounded domain")
        return _sup_norm(lambda x: np.abs(f(x)) * w(x), pts, samples, lipschitz)

    def integrand(x):
        return np.abs(np.asarray(f(x)) * w(x)) ** p

    total, err = integrate(integrand, pts, tol=tol, rtol=rtol)
    if total <= 0:
        return NormResult(0.0, err ** (1.0 / p), "AdaptiveQuadrature")
    value = total ** (1.0 / p)
    return NormResult(value, err * value / (p * total), "AdaptiveQuadrature")


def _sup_norm(g, pts, samples, lipschitz) -> NormResult:
    lo, hi = pts[0], pts[-1]
    x = np.unique(np.concatenate([np.linspace(lo, hi, samples), np.asarray(pts)]))
    h0 = float(np.max(np.diff(x))) if x.size > 1 else 0.0
    v = g(x)
    best = float(np.max(v))
    # zoom in around the largest samples
    for _ in range(3):
        top = x[np.argsort(v)[-8:]]
        h = float(np.max(np.diff(x))) if x.size > 1 else 0.0
        local = np.concatenate([np.linspace(max(lo, t - h), min(hi, t + h), 33) for t in top])
        x = np.unique(np.concatenate([top, local]))
        v = g(x)
        best = max(best, float(np.max(v)))
    if lipschitz is None:
        return NormResult(best, 0.0, "GridSup", certified=False)
    return NormResult(best, 0.5 * lipschitz * h0, "GridSup", certified=True)


# -- torus norms -----------------------------------------------------------------------


def _pow2_at_least(n: int) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(1, n)))))


def _is_even_integer(q: float) -> bool:
    return float(q).is_integer() and int(q) % 2 == 0


def torus_norm(coeffs, q, oversample: int = 8, rtol: float = 1e-12) -> NormResult:
    """``||sum_j c_j e^{-2 pi i j xi}||_{L^q(T)}``."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0:
        return NormResult(0.0, 0.0, "DftQuadrature")
    q = _as_exponent(q)
    deg = c.size - 1
    eps = np.finfo(float).eps
    if q == 2:
        v = math.sqrt(math.fsum((np.abs(c) ** 2).tolist()))
        return NormResult(v, 4 * eps * v, "Parseval")
    if math.isinf(q):
        return _torus_sup(c, oversample)
    L = _pow2_at_least(max(oversample * (deg + 1), 64, int(q * deg / 2) + 2))
    if _is_even_integer(q):
        s = np.fft.fft(c, n=L)
        v = float(np.mean(np.abs(s) ** q)) ** (1.0 / q)
        return NormResult(v, 16 * eps * v, "DftQuadrature")
    while True:
        s = np.fft.fft(c, n=L)
        m = float(np.mean(np.abs(s) ** q))
        half = float(np.mean(np.abs(s[::2]) ** q))
        err = abs(m - half)
        if err <= rtol * m or L >= 1 << 22:
            v = m ** (1.0 / q)
            dv = err * v / (q * m) if m > 0 else 0.0
            return NormResult(v, dv, "DftQuadrature")
        L *= 2


def _torus_sup(c, oversample) -> NormResult:
    deg = c.size - 1
    L = _pow2_at_least(max(2 * oversample * (deg + 1), 64))
    s = np.abs(np.fft.fft(c, n=L))
    best = float(np.max(s))
    k = np.arange(c.size)
    top = np.argsort(s)[-8:] / L
    h = 1.0 / L
    for _ in range(4):
        t = np.concatenate([np.linspace(a - h, a + h, 33) for a in top])
        vals = np.abs(np.exp(-2j * np.pi * np.outer(t, k)) @ c)
        best = max(best, float(np.max(vals)))
        top = t[np.argsort(vals)[-8:]]
        h /= 16
    # Bernstein: |S'| <= 2 pi deg ||S||, every point is within 1/(2L) of a sample
    ratio = math.pi * deg / L
    upper = float(np.max(s)) / (1.0 - ratio)
    return NormResult(best, max(0.0, upper - best), "DftQuadrature")


def partial_sum_norms(c, q, kind: str = "head", oversample: int = 8) -> np.ndarray:
    """``||S_k||_q`` (``kind="head"``) or ``||St_k||_q`` (``"tail"``) for every ``k``.

    Sup norms are sampled maxima on a grid 32 times finer than the degree.
    """
    c = np.asarray(c, dtype=float).ravel()
    q = _as_exponent(q)
    n = c.size
    if kind not in ("head", "tail"):
        raise ValueError(f"kind must be 'head' or 'tail', got {kind!r}")
    if q == 2:
        sq = c ** 2
        acc = np.cumsum(sq) if kind == "head" else np.cumsum(sq[::-1])[::-1]
        return np.sqrt(acc)
    if math.isinf(q):
        L = _pow2_at_least(max(32 * n, 64))
    else:
        # |S|^q has kinks of order q at the zeros of S unless q is even
        floor = 64 if q % 2 == 0 else 1024
        L = _pow2_at_least(max(oversample * n, floor, int(q * n / 2) + 2))
    k = np.arange(n)
    acc = np.zeros(n)
    rows = max(1, (1 << 22) // max(n, 1))
    for s in range(0, L, rows):
        t = np.arange(s, min(L, s + rows)) / L
        b = np.exp(-2j * np.pi * np.outer(t, k)) * c
        sums = np.cumsum(b, axis=1) if kind == "head" else np.cumsum(b[:, ::-1], axis=1)[:, ::-1]
        mag = np.abs(sums)
        if math.isinf(q):
            acc = np.maximum(acc, mag.max(axis=0))
        else:
            acc += (mag ** q).sum(axis=0)
    if math.isinf(q):
        return acc
    return (acc / L) ** (1.0 / q)


# -- coefficient-side majorants ---------------------------------------------------------


def _lp_sum(terms, p) -> float:
    terms = np.asarray(terms, dtype=float)
    return math.fsum(terms.tolist()) ** (1.0 / p)


def sbp_bound_1(spec: StepSpec, alpha, p) -> float:
    """``(sum_k |c_k|^p (k+1)^{p alpha} Delta_k^{p-1})^{1/p}``; max form for ``p = inf``."""
    p = _as_exponent(p)
    a = float(alpha)
    k1 = np.arange(spec.N + 1) + 1.0
    c = np.abs(spec.c)
    if math.isinf(p):
        return float(np.max(c * k1 ** a * spec.delta))
    return _lp_sum(c ** p * k1 ** (p * a) * spec.delta ** (p - 1), p)


def _steps_below(spec: StepSpec) -> np.ndarray:
    """``Delta_k - Delta_{k-1}`` with ``Delta_{-1} = 0``."""
    return np.diff(np.concatenate([[0.0], spec.delta]))


def sbp_bound_2(spec: StepSpec, beta, q, kernel: Optional[BumpKernel] = None) -> float:
    """``(sum_k Delta_k^{beta q} (Delta_k - Delta_{k-1}) ||St_k||_q^q)^{1/q}``."""
    spec.require_increasing()
    q = _as_exponent(q)
    b = float(beta)
    tails = partial_sum_norms(spec.c, q, "tail")
    if math.isinf(q):
        return float(np.max(spec.delta ** b * tails))
    return _lp_sum(spec.delta ** (b * q) * _steps_below(spec) * tails ** q, q)


def sbp_bound_3(spec: StepSpec, nu, q, kernel: Optional[BumpKernel] = None) -> float:
    """Majorant of ``||Ghat (1+|xi|)^-nu||_{q'}`` from the head sums ``S_k``.

    ``q`` is the Fourier-side exponent of the space; the bound is in ``q'``.
    """
    spec.require_increasing()
    qp = _conj_float(to_float(q))
    nu = float(nu)
    inv = 0.0 if math.isinf(qp) else 1.0 / qp
    if not nu > inv:
        raise ValueError(f"nu = {nu} must exceed 1/q' = {inv}")
    heads = partial_sum_norms(spec.c, qp, "head")
    d = spec.delta
    if math.isinf(qp):
        body = float(np.max(d[:-1] ** (-nu) * heads[:-1])) if spec.N > 0 else 0.0
        return body + d[-1] ** (-nu) * heads[-1]
    steps = np.diff(d)
    body = _lp_sum(d[:-1] ** (-nu * qp) * steps * heads[:-1] ** qp, qp) if spec.N > 0 else 0.0
    return body + d[-1] ** (-nu + 1.0 / qp) * heads[-1]


def _conj_float(q: float) -> float:
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    if q < 1:
        raise ValueError(f"exponent must be >= 1, got {q}")
    return q / (q - 1)


# y-grid for the profile integrals int |w(k + y/Delta)|^r |phi(y)|^r dy
def _profile_nodes(kernel: BumpKernel):
    y, wy = gauss_legendre_panels(-kernel.xmax, kernel.xmax, int(4 * kernel.xmax), order=8)
    return y, wy, np.abs(kernel.phi(y))


def bump_weight_norms(w: WeightSpec, r, delta, kernel: Optional[BumpKernel] = None) -> np.ndarray:
    """``||w(x) phi((x - k) Delta_k)||_r`` for ``k = 0..N``."""
    kernel = kernel or default_kernel()
    r = _as_exponent(r)
    delta = np.asarray(delta, dtype=float)
    y, wy, ph = _profile_nodes(kernel)
    out = np.empty(delta.size)
    for k in range(delta.size):
        wk = w(k + y / delta[k])
        if math.isinf(r):
            out[k] = float(np.max(wk * ph))
        else:
            out[k] = (float(np.dot(wy, (wk * ph) ** r)) / delta[k]) ** (1.0 / r)
    return out


def sbp2_bounds(spec: StepSpec, w: WeightSpec, exponent, which: str,
                kernel: Optional[BumpKernel] = None) -> float:
    """General-weight majorants for ``||F w||_p``, ``||Fhat w||_q`` and ``||Ghat w||_{q'}``.

    ``which`` is ``"F"``, ``"Fhat"`` or ``"Ghat"``; ``exponent`` is the
    Lebesgue exponent of the norm being bounded.
    """
    kernel = kernel or default_kernel()
    r = _as_exponent(exponent)
    d = spec.delta
    if which == "F":
        prof = bump_weight_norms(w, r, d, kernel)
        terms = np.abs(spec.c) * prof * d
        return float(np.max(terms)) if math.isinf(r) else _lp_sum(terms ** r, r)
    spec.require_increasing()
    if which == "Fhat":
        if w.direction == NON_INCREASING:
            raise ValueError("the Fhat majorant needs a non-decreasing weight")
        tails = partial_sum_norms(spec.c, r, "tail")
        if math.isinf(r):
            head = float(np.max(w(np.linspace(0, d[0] + 2, 257)))) * tails[0]
            body = float(np.max(w(d[1:]) * tails[1:])) if spec.N > 0 else 0.0
            return head + body
        head = w.power_integral(r, 0.0, d[0] + 2) ** (1.0 / r) * tails[0]
        body = _lp_sum(w(d[1:]) ** r * np.diff(d) * tails[1:] ** r, r) if spec.N > 0 else 0.0
        return head + body
    if which == "Ghat":
        if w.direction == NON_DECREASING:
            raise ValueError("the Ghat majorant needs a non-increasing weight")
        heads = partial_sum_norms(spec.c, r, "head")
        lo = d[-1] / 2 - 1
        if math.isinf(r):
            body = float(np.max(w(d[:-1] / 2) * heads[:-1])) if spec.N > 0 else 0.0
            return body + float(w(max(lo, 0.0))) * heads[-1]
        body = _lp_sum(w(d[:-1] / 2) ** r * np.diff(d) * heads[:-1] ** r, r) if spec.N > 0 else 0.0
        return body + w.power_integral(r, lo) ** (1.0 / r) * heads[-1]
    raise ValueError(f"which must be 'F', 'Fhat' or 'Ghat', got {which!r}")


def hardy_littlewood_bound(coeffs, q, kind: str = "tail", k: Optional[int] = None) -> float:
    """Monotone-coefficient majorant of ``||S_k||_q`` or ``||St_k||_q``.

    Tail (non-increasing ``c``): ``(sum_{j=k}^N c_j^q (j-k+1)^{q-2})^{1/q}``.
    Head (non-decreasing ``c``): ``(sum_{j=0}^k c_j^q (k-j+1)^{q-2})^{1/q}``.
    """
    c = np.asarray(coeffs, dtype=float).ravel()
    q = float(to_float(q))
    if not 1 < q < math.inf:
        raise ValueError(f"q must lie in (1, inf), got {q}")
    if np.any(c < 0):
        raise ValueError("coefficients must be nonnegative")
    if kind == "tail":
        k = 0 if k is None else k
        seg = c[k:]
        if np.any(np.diff(seg) > 0):
            raise ValueError("tail bound needs non-increasing coefficients")
        dist = np.arange(seg.size) + 1.0
    elif kind == "head":
        k = c.size - 1 if k is None else k
        seg = c[: k + 1]
        if np.any(np.diff(seg) < 0):
            raise ValueError("head bound needs non-decreasing coefficients")
        dist = (k - np.arange(seg.size)) + 1.0
    else:
        raise ValueError(f"kind must be 'head' or 'tail', got {kind!r}")
    return _lp_sum(seg ** q * dist ** (q - 2), q)


# -- measured norms of F, Fhat, Ghat ---------------------------------------------------


# phi changes sign close to multiples of 2/3 near the centre and vanishes at
# the even integers; panels ending there keep |phi|^p smooth inside
_NEAR_OFFSETS = np.arange(1, 37) * (2.0 / 3.0)


def _bump_offsets(radius: float, xmax: float) -> np.ndarray:
    far = np.arange(26.0, xmax + 1.0, 2.0)
    o = np.concatenate([_NEAR_OFFSETS, far])
    o = o[o <= max(radius, 1.0)]
    return np.concatenate([-o[::-1], [0.0], o])


class _LocalF:
    """``F`` near cell ``k`` in the local variable ``u = x - k``.

    The dominant term is evaluated at ``u Delta_k`` with no cancellation,
    which keeps full relative accuracy for scales up to ~1e8.
    """

    def __init__(self, spec: StepSpec, kernel: BumpKernel, tol: float):
        self.spec, self.kernel = spec, kernel
        self.radii = window_radii(spec, kernel, tol)
        self.reach = self.radii / spec.delta
        self.amp = spec.c * spec.delta
        k = np.arange(spec.N + 1)
        self.lo = float(min(np.min(k - self.reach), -0.5))
        self.hi = float(max(np.max(k + self.reach), spec.N + 0.5))

    def u_range(self, kc: int) -> tuple[float, float]:
        ulo = self.lo if kc == 0 else -0.5
        uhi = self.hi - kc if kc == self.spec.N else 0.5
        return ulo, uhi

    def terms(self, kc: int) -> np.ndarray:
        ulo, uhi = self.u_range(kc)
        j = np.arange(self.spec.N + 1)
        gap = np.maximum(0.0, np.maximum(j - kc - uhi, kc + ulo - j))
        return np.nonzero((gap <= self.reach) & (self.amp != 0))[0]

    def breakpoints(self, kc: int) -> np.ndarray:
        ulo, uhi = self.u_range(kc)
        pts = [np.array([ulo, uhi])]
        for j in self.terms(kc):
            o = (j - kc) + _bump_offsets(self.radii[j], self.kernel.xmax) / self.spec.delta[j]
            pts.append(o[(o > ulo) & (o < uhi)])
        pts = np.unique(np.concatenate(pts))
        keep = np.concatenate([[True], np.diff(pts) > 1e-15 * max(1.0, abs(ulo), abs(uhi))])
        pts = pts[keep]
        pts[-1] = uhi
        return pts

    def sign_changes(self, kc: int, pts: np.ndarray, J, per_panel: int = 8,
                     iterations: int = 16) -> np.ndarray:
        """Zeros of ``F`` bracketed on a sampling of the panels ``pts``.

        ``|F|^p`` has a kink at each zero; a kink near a panel midpoint is
        invisible to the Kronrod error estimate, so the zeros become
        breakpoints.
        """
        s = np.linspace(0.0, 1.0, per_panel + 1)[:-1]
        u = np.append((pts[:-1, None] + np.diff(pts)[:, None] * s[None, :]).ravel(), pts[-1])
        v = self.values(kc, u, J)
        idx = np.nonzero(v[:-1] * v[1:] < 0)[0]
        if idx.size == 0:
            return idx.astype(float)
        a, b, fa, fb = u[idx], u[idx + 1], v[idx], v[idx + 1]
        for _ in range(iterations):
            m = 0.5 * (a + b)
            fm = self.values(kc, m, J)
            left = fa * fm <= 0
            b, fb = np.where(left, m, b), np.where(left, fm, fb)
            a, fa = np.where(left, a, m), np.where(left, fa, fm)
        # F is smooth, so a secant step on the narrow bracket is accurate
        return a - fa * (b - a) / (fb - fa)

    def values(self, kc: int, u, J=None) -> np.ndarray:
        J = self.terms(kc) if J is None else J
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.size)
        d = self.spec.delta
        for s in range(0, J.size, 64):
            jj = J[s:s + 64]
            args = ((kc - jj)[None, :] + u[:, None]) * d[jj][None, :]
            out += self.kernel.phi(args) @ self.amp[jj]
        return out


def F_norm(spec: StepSpec, kernel: Optional[BumpKernel], w: WeightSpec, p,
           rtol: float = 1e-9, tol: float = 1e-12) -> NormResult:
    """Measured ``||F w||_p``, integrated cell by cell in local coordinates.

    Sup norms are sampled maxima (not certified).
    """
    kernel = kernel or default_kernel()
    p = _as_exponent(p)
    loc = _LocalF(spec, kernel, tol)
    _, trunc = eval_F(spec, kernel, 0.0, tol=tol, return_error=True)
    wmax = float(np.max(w(np.array([loc.lo, loc.hi, 0.0]))))
    if math.isinf(p):
        best = 0.0
        for kc in range(spec.N + 1):
            J = loc.terms(kc)
            ulo, uhi = loc.u_range(kc)
            y = np.arange(-24.0, 24.0, 1.0 / 32)
            u = np.concatenate([loc.breakpoints(kc), np.linspace(ulo, uhi, 257),
                                y / spec.delta[kc]])
            u = u[(u >= ulo) & (u <= uhi)]
            g = lambda v: np.abs(loc.values(kc, v, J)) * w(kc + v)
            best = max(best, _sup_norm(g, np.sort(u), 0, None).value)
        return NormResult(best, trunc * wmax, "GridSup", certified=False)
    smooth = p % 2 == 0
    vals, errs = [], []
    for kc in range(spec.N + 1):
        J = loc.terms(kc)
        if J.size == 0:
            continue
        f = lambda v, kc=kc, J=J: np.abs(loc.values(kc, v, J) * w(kc + v)) ** p
        pts = loc.breakpoints(kc)
        if not smooth:
            zeros = loc.sign_changes(kc, pts, J)
            if zeros.size:
                pts = np.unique(np.concatenate([pts, zeros]))
                pts = pts[np.concatenate([[True], np.diff(pts) > 1e-13])]
        v, e = integrate(f, pts, tol=1e-300, rtol=rtol)
        vals.append(v)
        errs.append(e)
    total = math.fsum(vals)
    err = math.fsum(errs)
    value = total ** (1.0 / p)
    dv = err * value / (p * total) if total > 0 else err ** (1.0 / p)
    # dropped terms are uniformly below trunc on a set of length hi - lo
    spill = trunc * wmax * (loc.hi - loc.lo) ** (1.0 / p)
    return NormResult(value, dv + spill, "AdaptiveQuadrature")


class _FourierSums:
    """Evaluation of ``Fhat``/``Ghat`` on the decomposition ``xi = m + t``."""

    def __init__(self, spec: StepSpec, kernel: BumpKernel, L: int, full_rows: bool):
        spec.require_increasing()
        self.spec = spec
        self.kernel = kernel
        self.c = spec.c
        self.d = spec.delta
        self.L = L
        self.t = np.arange(L) / L
        self.k = np.arange(spec.N + 1)
        self._cols: dict[int, np.ndarray] = {}
        self.T = None
        if full_rows:
            b = np.exp(-2j * np.pi * np.outer(self.t, self.k)) * self.c
            T = np.zeros((L, spec.N + 2), dtype=complex)
            T[:, :-1] = np.cumsum(b[:, ::-1], axis=1)[:, ::-1]
            self.T = T
        self.full = self.tail_column(0)

    def tail_column(self, k: int) -> np.ndarray:
        """``St_k(t_i)`` for all rows (zero for ``k > N``)."""
        if self.T is not None:
            return self.T[:, min(k, self.spec.N + 1)]
        if k > self.spec.N:
            return np.zeros(self.L, dtype=complex)
        col = self._cols.get(k)
        if col is None:
            masked = np.where(self.k >= k, self.c, 0.0)
            col = np.fft.fft(masked, n=self.L) if self.L > self.spec.N else None
            if col is None:
                raise ValueError("row count below the degree")
            if len(self._cols) > 512:
                self._cols.clear()
            self._cols[k] = col
        return col

    def k_range(self, smin: float, smax: float) -> tuple[int, int]:
        """Indices whose factor ``phihat(s/Delta_k)`` is not constant for ``|s|`` in the range."""
        k1 = int(np.searchsorted(self.d, smin, side="right"))
        k2 = int(np.searchsorted(self.d, 2.0 * smax, side="left"))
        return k1, max(k1, k2)

    def rows(self, s: np.ndarray, side: str) -> np.ndarray:
        """``P(s_ij, t_i)`` for ``s`` of shape ``(L, n)`` (each row its own points)."""
        a = np.abs(s)
        k1, k2 = self.k_range(float(a.min()), float(a.max()))
        P = np.repeat(self.tail_column(k2)[:, None], s.shape[1], axis=1)
        for k in range(k1, k2):
            bk = self.c[k] * np.exp(-2j * np.pi * k * self.t)
            P += bk[:, None] * self.kernel.phihat(a / self.d[k])
        if side == "G":
            P = self.full[:, None] - P
        return P

    def shared(self, s: np.ndarray, side: str) -> np.ndarray:
        """``P(s_j, t_i)`` for a common vector ``s``; returns ``(L, n)``."""
        a = np.abs(s)
        k1, k2 = self.k_range(float(a.min()), float(a.max()))
        P = np.repeat(self.tail_column(k2)[:, None], s.size, axis=1)
        if k2 > k1:
            ks = np.arange(k1, k2)
            E = np.exp(-2j * np.pi * np.outer(self.t, ks)) * self.c[ks]
            P += E @ self.kernel.phihat(a[None, :] / self.d[ks, None])
        if side == "G":
            P = self.full[:, None] - P
        return P


def fourier_norm(spec: StepSpec, kernel: Optional[BumpKernel], w: WeightSpec, q, side: str = "F",
                 cells: int = 96, rows: Optional[int] = None, rtol: float = 1e-10) -> NormResult:
    """Measured ``||Fhat w||_q`` (``side="F"``) or ``||Ghat w||_q`` (``side="G"``).

    Needs real coefficients and strictly increasing scales.
    """
    kernel = kernel or default_kernel()
    if side not in ("F", "G"):
        raise ValueError(f"side must be 'F' or 'G', got {side!r}")
    q = _as_exponent(q)
    N = spec.N
    dmax = spec.delta_max
    parseval = q == 2
    if rows is None:
        want = 2 * (N + 1) + 512 if parseval else max(8 * (N + 1), 256)
        rows = _pow2_at_least(want)
    L = rows
    if not parseval and L * (N + 2) > 1 << 24:
        raise ValueError(f"q = {q} with N = {N} needs too many rows; only q = 2 scales to large N")
    fs = _FourierSums(spec, kernel, L, full_rows=not parseval)
    X0 = int(cells)
    wq = lambda s: w(s) ** q if not math.isinf(q) else w(s)

    # cells -X0 .. X0-1, each sampled at the L nodes m + t_i
    if side == "F":
        m_hi = min(X0, int(math.ceil(dmax)) + 1)
    else:
        m_hi = X0
    direct = np.zeros(L)
    for m in range(-m_hi, m_hi):
        s = (m + fs.t)[:, None]
        P = np.abs(fs.rows(s, side)[:, 0])
        if math.isinf(q):
            direct = np.maximum(direct, P * wq(s[:, 0]))
        else:
            direct += P ** q * wq(s[:, 0])
    if math.isinf(q):
        return _fourier_sup(fs, spec, w, side, direct, X0, dmax)

    em_needed = side == "G" or dmax > X0 - 1
    if not em_needed:
        total = float(np.sum(direct)) / L
        half = float(np.sum(direct[::2])) / (L / 2)
        value = total ** (1.0 / q)
        return NormResult(value, _root_error(total, abs(total - half), q), "DftQuadrature")

    # cells m >= X0 by midpoint Euler-Maclaurin, per row t_i:
    #   sum_{m>=X0} h(m+t) = int_{X0+t-1/2}^inf h + h'(a)/24 - 7 h'''(a)/5760,  a = X0+t-1/2
    a0 = X0 - 0.5 + fs.t
    edge = X0 + 0.5
    gx, gw = np.polynomial.legendre.leggauss(16)
    width = edge - a0
    S = a0[:, None] + 0.5 * width[:, None] * (gx[None, :] + 1.0)
    Hs = np.abs(fs.rows(S, side)) ** q * wq(S)
    short = 0.5 * width * (Hs @ gw)
    h = 0.5
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    Sd = a0[:, None] + offs[None, :]
    Hd = np.abs(fs.rows(Sd, side)) ** q * wq(Sd)
    d1 = (Hd[:, 0] - 8 * Hd[:, 1] + 8 * Hd[:, 3] - Hd[:, 4]) / (12 * h)
    d3 = (-Hd[:, 0] + 2 * Hd[:, 1] - 2 * Hd[:, 3] + Hd[:, 4]) / (2 * h ** 3)
    corr = short + d1 / 24.0 - 7.0 * d3 / 5760.0

    upper = max(edge, dmax)
    bar, bar_err = _mean_row_integral(fs, spec, w, q, side, edge, upper, parseval, rtol)
    tail = 0.0
    if side == "G":
        sn = torus_norm(spec.c, q).value
        tail = sn ** q * w.power_integral(q, upper)
    em_full = bar + tail + float(np.mean(corr))
    em_half = bar + tail + float(np.mean(corr[::2]))

    # g(X0) at t = 0 for the reflection term
    g0 = float(np.abs(fs.rows(np.full((L, 1), float(X0)), side)[0, 0]) ** q * wq(np.array([float(X0)]))[0])
    total = float(np.sum(direct)) / L + 2.0 * em_full - g0 / L
    half = float(np.sum(direct[::2])) / (L / 2) + 2.0 * em_half - g0 / (L / 2)
    err = abs(total - half) + 2.0 * bar_err
    total = max(total, 0.0)
    return NormResult(total ** (1.0 / q), _root_error(total, err, q), "DftQuadrature")


def _root_error(total, err, q):
    if total <= 0:
        return err ** (1.0 / q)
    return err * total ** (1.0 / q) / (q * total)


def _mean_row_integral(fs: _FourierSums, spec, w, q, side, lo, hi, parseval, rtol):
    """``int_lo^hi mean_i |P(s, t_i)|^q w(s)^q ds``."""
    if hi <= lo:
        return 0.0, 0.0
    d = spec.delta
    c2 = spec.c ** 2
    suffix = np.concatenate([np.cumsum(c2[::-1])[::-1], [0.0]])
    prefix = np.concatenate([[0.0], np.cumsum(c2)])
    kernel = fs.kernel

    def bar_parseval(s):
        k1 = np.searchsorted(d, s, side="right")
        k2 = np.maximum(np.searchsorted(d, 2.0 * s, side="left"), k1)
        out = suffix[k2] if side == "F" else prefix[k1].copy()
        out = np.array(out, dtype=float)
        span = int(np.max(k2 - k1)) if s.size else 0
        for j in range(span):
            k = k1 + j
            live = k < k2
            kk = np.where(live, k, 0)
            a = kernel.phihat(s / d[kk])
            fac = a if side == "F" else 1.0 - a
            out += np.where(live, c2[kk] * fac ** 2, 0.0)
        return out * w(s) ** 2

    def bar_rows(s):
        k1 = np.searchsorted(d, s, side="right")
        k2 = np.maximum(np.searchsorted(d, 2.0 * s, side="left"), k1)
        out = np.empty(s.size)
        keys = k1 * (spec.N + 2) + k2
        for key in np.unique(keys):
            idx = np.nonzero(keys == key)[0]
            P = fs.shared(s[idx], side)
            out[idx] = np.mean(np.abs(P) ** q, axis=0)
        return out * w(s) ** q

    f = bar_parseval if parseval else bar_rows
    bps = np.concatenate([d / 2, d])
    bps = bps[(bps > lo) & (bps < hi)]
    if bps.size > 512:
        bps = np.unique(np.quantile(bps, np.linspace(0, 1, 513)))
    pts = np.unique(np.concatenate([[lo, hi], bps]))
    return integrate(f, pts, tol=1e-300, rtol=rtol)


def _fourier_sup(fs, spec, w, side, direct_max, X0, dmax) -> NormResult:
    best = float(np.max(direct_max))
    if side == "G" or dmax > X0:
        hi = max(dmax, X0 + 1.0)
        s = np.unique(np.concatenate([
            np.geomspace(X0, hi, 2048), spec.delta / 2, spec.delta,
        ]))
        s = s[(s >= X0) & (s <= hi)]
        for chunk in np.array_split(s, max(1, s.size // 256)):
            P = fs.shared(chunk, side)
            best = max(best, float(np.max(np.abs(P) * w(chunk)[None, :])))
    return NormResult(best, 0.0, "GridSup", certified=False)
