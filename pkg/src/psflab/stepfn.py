"""Smooth step functions built from scaled bumps at the integers.

For coefficients ``c_0..c_N`` and scales ``Delta_0..Delta_N``

    F(x)    = sum_k c_k Delta_k phi((x - k) Delta_k)
    Fhat(xi) = sum_k c_k e^{-2 pi i k xi} phihat(xi / Delta_k)
    Ghat(xi) = sum_k c_k e^{-2 pi i k xi} (1 - phihat(xi / Delta_k))

``G`` itself (integer Dirac masses minus ``F``) is only ever used through
``Ghat``.  ``S_k`` and ``St_k`` are the head and tail trigonometric sums of
the coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import zeta

from .bump import BumpKernel, default_kernel

DEFAULT_MAX_RATIO = 8.0
DEFAULT_TOL = 1e-12
_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class StepSpec:
    """Coefficients and scales of a step function.

    Parameters
    ----------
    c, delta : array_like
        ``c_0..c_N`` and ``Delta_0..Delta_N``; ``Delta_0 >= 1``.
    max_ratio : float
        Refuse specs whose neighbouring scales differ by more than this factor.
    """

    c: np.ndarray
    delta: np.ndarray
    max_ratio: float = DEFAULT_MAX_RATIO
    ratio_bound: float = field(init=False)
    increasing: bool = field(init=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float).ravel()
        d = np.array(self.delta, dtype=float).ravel()
        if c.size == 0 or c.size != d.size:
            raise ValueError(f"need equally long non-empty c and delta, got {c.size} and {d.size}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(d))):
            raise ValueError("c and delta must be finite")
        if d[0] < 1.0:
            raise ValueError(f"Delta_0 must be >= 1, got {d[0]}")
        if np.any(d <= 0):
            raise ValueError("scales must be positive")
        ratios = np.maximum(d[1:] / d[:-1], d[:-1] / d[1:]) if d.size > 1 else np.ones(1)
        r = float(np.max(ratios))
        if r > self.max_ratio:
            k = int(np.argmax(ratios))
            raise ValueError(
                f"Delta_{k + 1}/Delta_{k} ratio {r:.3g} exceeds the bound {self.max_ratio}"
            )
        c.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "ratio_bound", r)
        object.__setattr__(self, "increasing", bool(np.all(np.diff(d) > 0)))

    @property
    def N(self) -> int:
        return self.c.size - 1

    @property
    def delta_max(self) -> float:
        return float(np.max(self.delta))

    @property
    def delta_min(self) -> float:
        return float(np.min(self.delta))

    def require_increasing(self):
        if not self.increasing:
            raise ValueError("this bound needs strictly increasing scales")

    def scaled(self, factor: float) -> "StepSpec":
        return StepSpec(self.c * factor, self.delta, self.max_ratio)

    def to_dict(self) -> dict:
        return {"c": self.c.tolist(), "delta": self.delta.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, max_ratio: float = DEFAULT_MAX_RATIO) -> "StepSpec":
        return cls(data["c"], data["delta"], max_ratio=data.get("max_ratio", max_ratio))

    @classmethod
    def load(cls, path, max_ratio: float = DEFAULT_MAX_RATIO) -> "StepSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh), max_ratio)


# -- space side -------------------------------------------------------------


def window_radii(spec: StepSpec, kernel: BumpKernel, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Radius ``r_k`` in the scaled variable ``(x - k) Delta_k`` beyond which term k is dropped.

    Chosen so that every dropped term is below ``tol/(N+1)``, and capped at
    the end of the ``phi`` table.
    """
    amp = np.abs(spec.c) * spec.delta * (spec.N + 1) / tol
    with np.errstate(divide="ignore"):
        rho = np.full(amp.shape, np.inf)
        for m, k in kernel.decay_constants.items():
            if m == 0:
                continue
            rho = np.minimum(rho, (k * amp) ** (1.0 / m) - 1.0)
    rho = np.where(amp > 0, np.maximum(rho, 0.0), 0.0)
    return np.minimum(rho, kernel.xmax)


def truncation_error(spec: StepSpec, kernel: BumpKernel, radii: np.ndarray) -> float:
    """Uniform bound on what the windowed sum leaves out."""
    amp = np.abs(spec.c) * spec.delta
    return math.fsum((amp * kernel.tail_bound(radii)).tolist())


def eval_F(spec: StepSpec, kernel: BumpKernel | None, x, tol: float = DEFAULT_TOL,
           return_error: bool = False):
    """``F(x)``, summing only terms inside their decay window.

    Returns the values, or ``(values, error_bound)`` with ``return_error``.
    """
    kernel = kernel or default_kernel()
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    order = np.argsort(flat, kind="stable")
    xs = flat[order]
    out = np.zeros_like(xs)
    radii = window_radii(spec, kernel, tol)
    half_width = radii / spec.delta
    lo = np.searchsorted(xs, np.arange(spec.N + 1) - half_width, side="left")
    hi = np.searchsorted(xs, np.arange(spec.N + 1) + half_width, side="right")
    for k in np.nonzero((hi > lo) & (spec.c != 0))[0]:
        sl = slice(lo[k], hi[k])
        out[sl] += spec.c[k] * spec.delta[k] * kernel.phi((xs[sl] - k) * spec.delta[k])
    res = np.empty_like(out)
    res[order] = out
    res = res.reshape(x.shape)
    if res.ndim == 0:
        res = float(res)
    if return_error:
        return res, truncation_error(spec, kernel, radii)
    return res


def integer_values(spec: StepSpec, kernel: BumpKernel | None = None, tol: float = DEFAULT_TOL):
    """``F(n)`` at every integer where the windowed sum is nonzero.

    Returns ``(n, values)`` with ``n`` a contiguous integer range.  Terms
    are grouped by offset ``m = n - k``, so the cost is ``O(N * max_window)``.
    """
    kernel = kernel or default_kernel()
    radii = window_radii(spec, kernel, tol)
    reach = np.floor(radii / spec.delta).astype(np.int64)
    mmax = int(reach.max()) if reach.size else 0
    n = np.arange(-mmax, spec.N + mmax + 1)
    vals = np.zeros(n.size)
    amp = spec.c * spec.delta
    for m in range(-mmax, mmax + 1):
        ks = np.nonzero(reach >= abs(m))[0]
        if ks.size == 0:
            continue
        contrib = amp[ks] * kernel.phi(m * spec.delta[ks])
        # n = k + m sits at position k + m + mmax
        np.add.at(vals, ks + m + mmax, contrib)
    return n, vals


def eval_F_at_integers(spec: StepSpec, kernel: BumpKernel | None, n) -> np.ndarray:
    grid, vals = integer_values(spec, kernel)
    n = np.asarray(n, dtype=np.int64)
    pos = n - grid[0]
    inside = (pos >= 0) & (pos < grid.size)
    out = np.zeros(n.shape)
    out[inside] = vals[pos[inside]]
    return out


# -- Fourier side -------------------------------------------------------------


def _modulated_sum(c, xi, weights_fn, k_index):
    xi = np.asarray(xi, dtype=float)
    flat = xi.ravel()
    out = np.zeros(flat.size, dtype=complex)
    step = max(1, _CHUNK // max(1, c.size))
    for s in range(0, flat.size, step):
        x = flat[s:s + step]
        w = weights_fn(x)
        phase = np.exp(-2j * np.pi * np.outer(x, k_index))
        out[s:s + step] = (phase * w) @ c
    out = out.reshape(xi.shape)
    return complex(out) if out.ndim == 0 else out


def eval_Fhat(spec: StepSpec, kernel: BumpKernel | None, xi):
    """``Fhat(xi)``; exactly zero for ``|xi| >= max Delta``."""
    kernel = kernel or default_kernel()
    k = np.arange(spec.N + 1)
    return _modulated_sum(spec.c, xi, lambda x: kernel.phihat(x[:, None] / spec.delta[None, :]), k)


def eval_Ghat(spec: StepSpec, kernel: BumpKernel | None, xi):
    """``Ghat(xi)``; exactly zero for ``|xi| <= min Delta / 2``."""
    kernel = kernel or default_kernel()
    k = np.arange(spec.N + 1)
    return _modulated_sum(
        spec.c, xi, lambda x: 1.0 - kernel.phihat(x[:, None] / spec.delta[None, :]), k
    )


# -- trigonometric sums ---------------------------------------------------------


def trig_poly(coeffs, xi, start: int = 0):
    """``sum_j coeffs[j] e^{-2 pi i (start + j) xi}``."""
    coeffs = np.asarray(coeffs)
    k = start + np.arange(coeffs.size)
    return _modulated_sum(coeffs, xi, lambda x: np.ones((x.size, 1)), k)


@dataclass(frozen=True)
class TrigPolyRef:
    """Head sum ``S_k`` (``kind="head"``) or tail sum ``St_k`` (``kind="tail"``)."""

    spec: StepSpec
    kind: Literal["head", "tail"]
    k: int

    def __post_init__(self):
        if self.kind not in ("head", "tail"):
            raise ValueError(f"kind must be 'head' or 'tail', got {self.kind!r}")
        if not 0 <= self.k <= self.spec.N:
            raise IndexError(f"index {self.k} outside 0..{self.spec.N}")

    def coefficients(self) -> tuple[np.ndarray, int]:
        """Coefficient block and the frequency of its first entry."""
        if self.kind == "head":
            return self.spec.c[: self.k + 1], 0
        return self.spec.c[self.k:], self.k


def trig_eval(poly: TrigPolyRef, xi):
    coeffs, start = poly.coefficients()
    return trig_poly(coeffs, xi, start)


# -- spikes at the integers -------------------------------------------------------


def spike_constant(kernel: BumpKernel, M: int) -> float:
    """``K'_M`` in ``|F(n) - phi(0) Delta_n c_n| <= K'_M ||c||_inf (1/n + 1/D_n)^M``.

    Comes from splitting the off-diagonal sum at ``k = n/2`` and bounding
    ``|phi|`` with the order ``M + 1`` envelope.
    """
    if M < 1:
        raise ValueError("spike bound needs M >= 1")
    k_next = kernel.decay_constant(M + 1)
    return k_next * max(5.0 * 2.0 ** M, 2.0 * float(zeta(M + 1)))


@dataclass(frozen=True)
class SpikeDefect:
    n: np.ndarray
    defect: np.ndarray
    bound: np.ndarray
    truncation: float

    @property
    def holds(self) -> bool:
        return bool(np.all(self.defect <= self.bound + self.truncation))


def spike_defects(spec: StepSpec, kernel: BumpKernel | None, M: int, n=None) -> SpikeDefect:
    """Defect and bound at each ``n`` in ``0..N`` (or the given subset).

    ``D_n`` is the smallest scale with index ``>= floor(n/2)``, which equals
    ``Delta_{floor(n/2)}`` for increasing scales.  At ``n = 0`` there are no
    indices below ``n/2`` and the ``1/n`` term is dropped.
    """
    kernel = kernel or default_kernel()
    kp = spike_constant(kernel, M)
    if n is None:
        n = np.arange(spec.N + 1)
    n = np.asarray(n, dtype=np.int64)
    if np.any((n < 0) | (n > spec.N)):
        raise IndexError(f"n must lie in 0..{spec.N}")
    grid, vals = integer_values(spec, kernel)
    fn = vals[n - grid[0]]
    defect = np.abs(fn - kernel.phi(0.0) * spec.delta[n] * spec.c[n])
    suffix_min = np.minimum.accumulate(spec.delta[::-1])[::-1]
    d_n = suffix_min[n // 2]
    with np.errstate(divide="ignore"):
        inv_n = np.where(n > 0, 1.0 / np.maximum(n, 1), 0.0)
    bound = kp * float(np.max(np.abs(spec.c))) * (inv_n + 1.0 / d_n) ** M
    _, trunc = eval_F(spec, kernel, 0.0, return_error=True)
    return SpikeDefect(n, defect, bound, trunc)


def spike_defect(spec: StepSpec, kernel: BumpKernel | None, n: int, M: int) -> tuple[float, float]:
    """``(|F(n) - phi(0) Delta_n c_n|, bound)`` at a single ``n``."""
    res = spike_defects(spec, kernel, M, [n])
    if not res.holds:
        raise AssertionError(
            f"spike defect {res.defect[0]:.3g} exceeds bound {res.bound[0]:.3g} at n={n}"
        )
    return float(res.defect[0]), float(res.bound[0])
