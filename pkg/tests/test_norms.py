import math

import numpy as np
import pytest
from scipy import optimize

from psflab.bump import default_kernel
from psflab.norms import (
    CONSTANT,
    NON_DECREASING,
    NON_INCREASING,
    WeightSpec,
    F_norm,
    bump_weight_norms,
    fourier_norm,
    hardy_littlewood_bound,
    line_norm,
    partial_sum_norms,
    sbp2_bounds,
    torus_norm,
)
from psflab.quadrature import NonIntegrableError, gauss_legendre_panels
from psflab.stepfn import StepSpec, eval_F, eval_Fhat, eval_Ghat


@pytest.fixture(scope="module")
def kernel():
    return default_kernel()


@pytest.fixture(scope="module")
def spec():
    return StepSpec([1.0, -0.5, 0.25, 0.8], [1.0, 1.7, 2.9, 4.4])


def _torus_grid(c, q, L=4096):
    t = np.arange(L) / L
    vals = np.exp(-2j * np.pi * np.outer(t, np.arange(len(c)))) @ np.asarray(c, dtype=complex)
    return float(np.mean(np.abs(vals) ** q) ** (1 / q))


# -- weights ---------------------------------------------------------------------

def test_weight_parsing():
    assert WeightSpec.parse("pow:1.5")(np.array([1.0]))[0] == pytest.approx(2 ** 1.5)
    assert WeightSpec.parse("abs:2")(np.array([-3.0]))[0] == 9.0
    assert WeightSpec.parse("const").direction == CONSTANT
    with pytest.raises(ValueError):
        WeightSpec.parse("cube:2")


def test_inverse_flips_direction():
    w = WeightSpec.shifted(2)
    assert w.direction == NON_DECREASING
    assert w.inverse().direction == NON_INCREASING
    x = np.linspace(0, 5, 11)
    assert np.allclose(w(x) * w.inverse()(x), 1.0)


def test_power_integral_closed_form():
    w = WeightSpec.shifted(-1)
    assert w.power_integral(2, 0.0) == pytest.approx(1.0)
    assert w.power_integral(1, 0.0, math.e - 1) == pytest.approx(1.0)
    with pytest.raises(NonIntegrableError):
        w.power_integral(1, 0.0)
    assert WeightSpec.power(2).power_integral(1, -1.0, 2.0) == pytest.approx(3.0)


def test_table_weight(tmp_path):
    w = WeightSpec.from_table([0, 1, 3], [1, 2, 8])
    assert w.direction == NON_DECREASING
    assert w(np.array([0.5]))[0] == pytest.approx(math.sqrt(2))
    # power-law continuation through the last two nodes
    slope = math.log(4) / math.log(3)
    assert w(np.array([9.0]))[0] == pytest.approx(8 * 3 ** slope)
    path = tmp_path / "w.txt"
    path.write_text("0 1\n1 2\n3 8\n")
    assert WeightSpec.parse(f"file:{path}")(np.array([2.0]))[0] == pytest.approx(w(np.array([2.0]))[0])
    with pytest.raises(ValueError):
        WeightSpec.from_table([0, 1, 2], [1, 3, 2])


def test_table_weight_tail_integral():
    w = WeightSpec.from_table([0, 1, 2], [1, 0.5, 0.25])
    # beyond x = 2 the weight is (x/2)^-1 / 4, so the square integrates to 1/8
    head = 1 / (2 * math.log(2)) * (1 - 0.25) + 1 / (2 * math.log(2)) * (0.25 - 0.0625)
    assert w.power_integral(2, 0.0) == pytest.approx(head + 0.0625 * 2, rel=1e-8)


# -- torus norms -----------------------------------------------------------------

@pytest.mark.parametrize("q", [1, 1.5, 2, 3, 4])
def test_torus_norm(q):
    c = [1.0, -2.0, 0.5, 3.0, 0.25]
    assert torus_norm(c, q).value == pytest.approx(_torus_grid(c, q), rel=1e-9)


def test_torus_norm_parseval():
    c = np.arange(1.0, 9.0)
    r = torus_norm(c, 2)
    assert r.method == "Parseval"
    assert r.value == pytest.approx(math.sqrt(np.sum(c ** 2)), rel=1e-15)


@pytest.mark.parametrize("q", [1.5, 2, 4])
@pytest.mark.parametrize("kind", ["head", "tail"])
def test_partial_sum_norms(q, kind):
    c = np.array([0.3, -1.0, 2.0, 0.7, -0.2, 1.1])
    got = partial_sum_norms(c, q, kind)
    for k in range(c.size):
        block = c[: k + 1] if kind == "head" else c[k:]
        assert got[k] == pytest.approx(_torus_grid(block, q, 1 << 16), rel=1e-9 if q % 2 == 0 else 1e-6)


def test_hardy_littlewood_formula():
    c = np.array([1.0, 0.5, 0.25])
    expected = (1.0 + 0.5 ** 3 * 2 + 0.25 ** 3 * 3) ** (1 / 3)
    assert hardy_littlewood_bound(c, 3, "tail") == pytest.approx(expected)
    with pytest.raises(ValueError):
        hardy_littlewood_bound(c[::-1], 3, "tail")


# -- norms of the step function ------------------------------------------------------

def _panel_reference(f, lo, hi, p, w):
    """``int |f w|^p`` with panels split at the sign changes of ``f``."""
    g = np.linspace(lo, hi, int((hi - lo) * 2000) + 1)
    v = f(g)
    idx = np.nonzero(v[:-1] * v[1:] < 0)[0]
    zeros = [optimize.brentq(f, g[i], g[i + 1], xtol=1e-15) for i in idx]
    edges = np.array([lo, *zeros, hi])
    t, wt = np.polynomial.legendre.leggauss(30)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        sub = np.linspace(a, b, max(2, int((b - a) * 10) + 1))
        for a2, b2 in zip(sub[:-1], sub[1:]):
            x = 0.5 * (a2 + b2) + 0.5 * (b2 - a2) * t
            total += 0.5 * (b2 - a2) * wt @ (np.abs(f(x)) * w(x)) ** p
    return total ** (1 / p)


@pytest.mark.parametrize("p,w", [(1, WeightSpec.constant()), (2, WeightSpec.shifted(1)),
                                 (3, WeightSpec.power(0.5))])
def test_F_norm_against_panels(spec, kernel, p, w):
    ref = _panel_reference(lambda x: eval_F(spec, kernel, x), -100.0, 104.0, p, w)
    assert F_norm(spec, kernel, w, p).value == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("q,w", [(1, WeightSpec.constant()), (2, WeightSpec.shifted(1)),
                                 (4, WeightSpec.power(0.5))])
def test_Fhat_norm_against_panels(spec, kernel, q, w):
    top = spec.delta_max
    x, wx = gauss_legendre_panels(-top, top, 2000)
    ref = float(wx @ (np.abs(eval_Fhat(spec, kernel, x)) * w(x)) ** q) ** (1 / q)
    assert fourier_norm(spec, kernel, w, q, "F").value == pytest.approx(ref, rel=1e-7)


def test_Ghat_norm_against_panels(spec, kernel):
    w = WeightSpec.shifted(-2)
    x, wx = gauss_legendre_panels(-400.0, 400.0, 16000)
    head = float(wx @ (np.abs(eval_Ghat(spec, kernel, x)) * w(x)) ** 2)
    # |Ghat| is at most the l1 norm of c beyond 400, which bounds the rest
    assert fourier_norm(spec, kernel, w, 2, "G").value ** 2 == pytest.approx(head, rel=1e-6)


def test_plancherel(spec, kernel):
    one = WeightSpec.constant()
    a = F_norm(spec, kernel, one, 2).value
    b = fourier_norm(spec, kernel, one, 2, "F").value
    assert a == pytest.approx(b, rel=1e-9)


def test_line_norm_gaussian():
    r = line_norm(lambda x: np.exp(-np.pi * x * x), 2)
    assert r.value == pytest.approx(2 ** -0.25, rel=1e-10)


def test_bump_weight_norms_constant_weight(kernel):
    d = np.array([1.0, 2.0, 4.0])
    base = bump_weight_norms(WeightSpec.constant(), 2, d[:1], kernel)[0]
    got = bump_weight_norms(WeightSpec.constant(), 2, d, kernel)
    assert np.allclose(got, base / np.sqrt(d), rtol=1e-12)


def test_general_majorants(spec, kernel):
    w = WeightSpec.shifted(0.5)
    double = StepSpec(2 * spec.c, spec.delta)
    for which in ("F", "Fhat"):
        one = sbp2_bounds(spec, w, 2, which, kernel)
        assert sbp2_bounds(double, w, 2, which, kernel) == pytest.approx(2 * one)
    # up to a constant of order one the Fourier-side majorant controls the norm
    assert sbp2_bounds(spec, w, 2, "Fhat", kernel) >= fourier_norm(spec, kernel, w, 2, "F").value
    with pytest.raises(ValueError):
        sbp2_bounds(spec, w, 2, "Ghat", kernel)
    assert sbp2_bounds(spec, WeightSpec.shifted(-1), 2, "Ghat", kernel) > 0
