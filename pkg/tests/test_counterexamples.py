import math
from fractions import Fraction

import numpy as np
import pytest

from psflab.counterexamples import (
    absolute_mass,
    default_schedule,
    diagonal_function,
    extkah2_family,
    extkah2_params,
    extkah2_qinf_family,
    extkah2_qinf_params,
    kernel_sum,
    kernel_sum_ratio,
    mainth3_family,
    mainth3_params,
    pq11_absolute_bound,
)
from psflab.psf import gaussian_pair
from psflab.regime import ParamPoint


def test_main_family_exponents():
    fp = mainth3_params(ParamPoint.parse("2,2,1,1"))
    assert (fp.A, fp.B) == (Fraction(2), Fraction(1))
    with pytest.raises(ValueError):
        mainth3_params(ParamPoint.parse("2,2,2,2"))


def test_main_family_values():
    spec = mainth3_family(ParamPoint.parse("2,2,1,1"), 10)
    k = np.arange(11.0)
    assert np.allclose(spec.c, (k + 1) ** -2 * np.log(k + 2) ** -2)
    assert np.allclose(spec.delta, np.maximum(1, (k + 1) * np.log(k + 2)))
    assert spec.increasing


def test_signed_family_needs_its_surface():
    pt = ParamPoint.parse("2,4,1,5/4")
    fp = extkah2_params(pt)
    assert (fp.A, fp.B) == (Fraction(5, 2), Fraction(1))
    signs = np.where(np.arange(33) % 3 == 0, -1.0, 1.0)
    spec = extkah2_family(pt, 32, signs)
    assert np.array_equal(np.sign(spec.c), signs)
    with pytest.raises(ValueError, match="off the surface"):
        extkah2_params(ParamPoint.parse("2,4,1,1"))
    with pytest.raises(ValueError):
        extkah2_family(pt, 32, np.full(33, 0.5))


def test_sup_family_support():
    pt = ParamPoint.parse("2,inf,3/4,2")
    fp = extkah2_qinf_params(pt)
    assert fp.B == Fraction(1, 2) and fp.p_sharp == 0
    spec = extkah2_qinf_family(pt, 50)
    nz = np.nonzero(spec.c)[0]
    assert nz[0] == 8 and nz[-1] == 50


def test_absolute_mass():
    spec = mainth3_family(ParamPoint.parse("2,2,1,1"), 5)
    assert absolute_mass(spec) == pytest.approx(float(np.sum(np.abs(spec.c) * spec.delta)))


def test_default_schedule():
    assert default_schedule(2) == [16, 1619]
    with pytest.warns(UserWarning):
        assert default_schedule(3)[-1] == 10 ** 7


def test_diagonal_function_sums():
    pt = ParamPoint.parse("2,2,1,1")
    d = diagonal_function(pt, 2, schedule=[16, 64])
    assert d.weights[0] < 0 < d.weights[1]
    x = np.arange(-200, 300, dtype=float)
    assert d.sums_at(1000) == pytest.approx(math.fsum(d.pair.f(x).tolist()), abs=1e-9)
    assert len(d.schedule_sums()) == 2


@pytest.mark.parametrize("alpha,M", [(1.0, 2), (0.5, 4), (2.0, 1)])
def test_kernel_sum_closed_form(alpha, M):
    xi = np.array([0.3, 1.0, 4.5, 30.0])
    n = np.arange(1, 400001, dtype=float)
    s = alpha * M
    # midpoint estimate of the remainder beyond the last term
    rest = (n[-1] + 0.5) ** (1 - s) / (s - 1)
    naive = [np.sum(np.minimum(1.0, (x / n ** alpha) ** M)) + x ** M * rest for x in xi]
    assert np.allclose(kernel_sum(xi, alpha, M), naive, rtol=1e-8)
    assert np.all(kernel_sum_ratio(np.geomspace(1, 1e6, 13), alpha, M) < 10)


def test_kernel_sum_divergent():
    with pytest.raises(ValueError):
        kernel_sum(1.0, 0.5, 2)


def test_absolute_bound_for_gaussian():
    res = pq11_absolute_bound(gaussian_pair(1.0), 1.0, 6)
    assert res.lhs == pytest.approx(1.086434811213308, rel=1e-6)
    assert res.lhs <= res.majorant
