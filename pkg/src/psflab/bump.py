"""The compactly supported bump ``phihat`` and its inverse transform ``phi``.

``phihat`` is even, non-increasing on ``[0, inf)``, equal to 1 on
``[-1/2, 1/2]`` and vanishes outside ``(-1, 1)``.  Between 1/2 and 1 it
follows the smooth transition

    h(t) = theta(1 - t) / (theta(t) + theta(1 - t)),   theta(t) = exp(-1/t),

evaluated at ``t = 2(|xi| - 1/2)``.  Because ``h(t) + h(1 - t) = 1`` the
transition integrates to 1/4 on each side, so ``phi(0) = 3/2`` exactly.

``phi(x) = 2 int_0^1 phihat(xi) cos(2 pi x xi) dxi`` is tabulated once on a
uniform grid and interpolated afterwards.  The tabulation integrates by parts,

    phi(x) = -1/(pi x) int_0^1 h'(u) sin(pi x (1 + u)) du,

where ``h'`` is flat at both ends; the trapezoid rule is then spectrally
accurate and the whole grid is a single FFT.
"""

from __future__ import annotations

import functools

import numpy as np

GRID_STEP = 2.0 ** -10
GRID_MAX = 160.0
VALIDATED_ORDERS = tuple(range(11))
_TRAPEZOID_NODES = 4096
_HEADROOM = 1.1
_FORMAT_VERSION = 1

#: phi(0) = int phihat, fixed by the symmetric transition
PHI_ZERO = 1.5


def transition(t):
    """``h(t)``: 1 for ``t <= 0``, 0 for ``t >= 1``, smooth in between."""
    t = np.asarray(t, dtype=float)
    out = np.where(t <= 0.0, 1.0, 0.0)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        u = t[inside]
        g = 1.0 / (1.0 - u) - 1.0 / u
        e = np.exp(-np.abs(g))
        out[inside] = np.where(g > 0, e / (1.0 + e), 1.0 / (1.0 + e))
    return out


def transition_derivative(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        u = t[inside]
        g = 1.0 / (1.0 - u) - 1.0 / u
        e = np.exp(-np.abs(g))
        out[inside] = -(1.0 / (1.0 - u) ** 2 + 1.0 / u ** 2) * e / (1.0 + e) ** 2
    return out


def _phi_small(x):
    """Direct Gauss-Legendre evaluation, used near the origin."""
    t, w = np.polynomial.legendre.leggauss(24)
    panels = 64
    left = np.arange(panels) / panels
    u = (left[:, None] + (t[None, :] + 1.0) / (2 * panels)).ravel()
    wu = np.tile(w / (2 * panels), panels) * transition(u)
    return np.sinc(x) + np.cos(np.pi * np.outer(x, 1.0 + u)) @ wu


def _tabulate_phi(step, xmax, nodes):
    n = int(round(xmax / step)) + 1
    u = np.arange(nodes + 1) / nodes
    a = transition_derivative(u) / nodes
    length = int(round(2 * nodes / step))
    s = np.fft.ifft(a, n=length)[:n] * length
    x = np.arange(n) * step
    values = np.empty(n)
    near = x < 1.0
    values[near] = _phi_small(x[near])
    far = ~near
    values[far] = -np.imag(np.exp(1j * np.pi * x[far]) * s[far]) / (np.pi * x[far])
    return x, values


class BumpKernel:
    """Tabulated bump pair; immutable after construction.

    Parameters
    ----------
    step, xmax : float
        Grid spacing and extent of the ``phi`` table on ``[0, xmax]``.
    """

    def __init__(self, step: float = GRID_STEP, xmax: float = GRID_MAX):
        self.step = float(step)
        self.xmax = float(xmax)
        self.grid, self.values = _tabulate_phi(self.step, self.xmax, _TRAPEZOID_NODES)
        self.grid.flags.writeable = False
        self.values.flags.writeable = False
        # mirrored padding so the 5-point stencil is valid down to x = 0
        self._padded = np.concatenate([self.values[2:0:-1], self.values])
        env = np.abs(self.values)
        self.decay_constants = {
            m: _HEADROOM * float(np.max(env * (1.0 + self.grid) ** m)) for m in VALIDATED_ORDERS
        }
        dense = np.linspace(0.0, 1.0, 200001)
        # phihat'(xi) = 2 h'(2 xi - 1) on the transition
        self.lipschitz = 1.01 * 2.0 * float(np.max(np.abs(transition_derivative(dense))))

    # -- Fourier side -----------------------------------------------------

    def phihat(self, xi):
        xi = np.asarray(xi, dtype=float)
        if np.any(np.isnan(xi)):
            raise ValueError("phihat evaluated at NaN")
        a = np.abs(xi)
        return np.where(a <= 0.5, 1.0, transition(2.0 * (a - 0.5)))

    # -- space side -------------------------------------------------------

    def phi(self, x):
        """Interpolated ``phi``; returns 0 beyond the table (see :meth:`tail_bound`)."""
        x = np.asarray(x, dtype=float)
        if np.any(np.isnan(x)):
            raise ValueError("phi evaluated at NaN")
        a = np.abs(x)
        out = np.zeros_like(a)
        inside = a <= self.xmax
        if np.any(inside):
            out[inside] = self._interp(a[inside])
        return out if out.ndim else float(out)

    def _interp(self, a):
        h = self.step
        n = len(self.values)
        i = np.floor(a / h).astype(np.int64)
        # stencil i-2 .. i+2, shifted left at the right edge
        start = np.minimum(i - 2, n - 5)
        s = a / h - start
        pts = self._padded
        base = start + 2
        v = [pts[base + j] for j in range(5)]
        out = np.zeros_like(a)
        for j in range(5):
            lj = np.ones_like(a)
            for m in range(5):
                if m != j:
                    lj *= (s - m) / (j - m)
            out += lj * v[j]
        return out

    def tail_bound(self, r):
        """Envelope bound on ``|phi(x)|`` for ``|x| >= r`` from the decay constants."""
        r = np.asarray(r, dtype=float)
        bounds = [k * (1.0 + r) ** (-m) for m, k in self.decay_constants.items()]
        return np.min(np.stack(bounds), axis=0)

    def phi_with_error(self, x):
        """``(value, error bound)``; the bound is nonzero only outside the table."""
        x = np.asarray(x, dtype=float)
        val = self.phi(x)
        err = np.where(np.abs(x) > self.xmax, self.tail_bound(np.abs(x)), 0.0)
        return val, err

    def decay_constant(self, m: int) -> float:
        """``K_M`` with ``|phi(x)| <= K_M (1 + |x|)^-M`` on the table."""
        if m not in self.decay_constants:
            raise ValueError(f"decay order {m} not validated; choose from {VALIDATED_ORDERS}")
        return self.decay_constants[m]

    def parameters(self) -> dict:
        return {
            "format_version": _FORMAT_VERSION,
            "transition": "theta(1-t)/(theta(t)+theta(1-t)), theta(t)=exp(-1/t)",
            "grid_step": self.step,
            "grid_max": self.xmax,
            "phi0": float(self.values[0]),
            "lipschitz": self.lipschitz,
        }


@functools.lru_cache(maxsize=None)
def default_kernel() -> BumpKernel:
    return BumpKernel()


def phihat_eval(kernel: BumpKernel, xi):
    return kernel.phihat(xi)


def phi_eval(kernel: BumpKernel, x):
    return kernel.phi(x)


def decay_constant(kernel: BumpKernel, m: int) -> float:
    return kernel.decay_constant(m)
