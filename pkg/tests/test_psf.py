import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, special

from psflab.bump import default_kernel
from psflab.psf import (
    dirichlet,
    dirichlet_tail_bound,
    gaussian_pair,
    partial_sum,
    perturbed_gaussian_pair,
    psf_defect_series,
    smoothed_sum,
    step_pair,
    theta_sides,
    weighted_sum_Q,
    _ceil_power,
)
from psflab.regime import ParamPoint
from psflab.stepfn import StepSpec


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_theta_identity(t):
    a, b = theta_sides(t, 16)
    assert abs(a - b) <= 1e-12


def test_gaussian_partial_sum_value():
    assert partial_sum(gaussian_pair(1.0).f, 3) == pytest.approx(1.086434811213308, rel=1e-15)


def test_smoothed_sum_counts_plateau():
    # phihat(k/N) is 1 for |k| <= N/2 and tapers beyond
    kernel = default_kernel()
    total = smoothed_sum(lambda k: np.ones_like(k), 8, kernel)
    assert 9 <= total <= 15


def test_weighted_sum_Q():
    assert weighted_sum_Q(lambda k: np.ones_like(k), lambda k: k, 2, 4) == pytest.approx(10 / 16)
    with pytest.raises(ValueError):
        weighted_sum_Q(np.cos, [3.0, 2.0, 1.0], 1, 2)


def test_dirichlet_kernel():
    xi = np.array([0.0, 0.13, 0.5, 2.0, 1e-10])
    naive = np.array([sum(math.cos(2 * math.pi * j * x) for j in range(-5, 6)) for x in xi])
    assert np.allclose(dirichlet(5, xi), naive, atol=1e-12)


def test_dirichlet_tail_against_direct_integral():
    M, N, beta, qp = 3, 8, 1.0, 2
    direct, _ = integrate.quad(lambda x: dirichlet(M, x) ** 2 * x ** -2.0, N / 2, 400,
                               limit=4000, epsabs=1e-13)
    # beyond 400 the square averages to 2M + 1
    direct += (2 * M + 1) / 400
    res = dirichlet_tail_bound(M, N, beta, qp)
    assert res.left == pytest.approx(math.sqrt(direct), rel=1e-4)
    assert res.right == pytest.approx(M ** 0.5 * N ** -0.5)


def test_dirichlet_tail_hurwitz_reduction():
    # periodic reduction checked against a plain trapezoid rule on one period
    M, N, s = 1, 6, 3.0
    res = dirichlet_tail_bound(M, N, s / 2, 2)
    t = np.linspace(0, 1, 200001)
    ref = np.trapezoid(dirichlet(M, t) ** 2 * special.zeta(s, N / 2 + t), t)
    assert res.left == pytest.approx(math.sqrt(ref), rel=1e-8)


def test_dirichlet_tail_rejects_divergent():
    with pytest.raises(ValueError):
        dirichlet_tail_bound(4, 8, 0.4, 2)


def test_dirichlet_tail_assertion():
    with pytest.raises(AssertionError):
        dirichlet_tail_bound(64, 128, 1.0, 2, C=1e-6)


def test_perturbed_gaussian_transform():
    pair = perturbed_gaussian_pair(1.3, lam=0.4, shift=0.7)
    for xi in (0.0, 0.4, 1.1):
        re, _ = integrate.quad(lambda x: pair.f(x) * math.cos(2 * math.pi * x * xi), -30, 30,
                               limit=400)
        im, _ = integrate.quad(lambda x: -pair.f(x) * math.sin(2 * math.pi * x * xi), -30, 30,
                               limit=400)
        assert abs(pair.fhat(xi) - complex(re, im)) < 1e-10


def test_ceil_power_exact():
    assert _ceil_power(8, Fraction(2, 3)) == 4
    assert _ceil_power(9, Fraction(1, 2)) == 3
    assert _ceil_power(10, Fraction(1, 2)) == 4
    assert _ceil_power(7, Fraction(1)) == 7


def test_defect_series_gaussian():
    s = psf_defect_series(gaussian_pair(1.0), ParamPoint.parse("2,2,1,1"), [4, 8, 16])
    assert np.all(np.abs(s.defects()) < 1e-14)
    lines = s.to_csv().splitlines()
    assert lines[0] == "N,M,P_N_f,P_M_fhat,defect,gamma,seed"
    assert len(lines) == 4


def test_defect_series_refuses_failing_points():
    with pytest.raises(ValueError, match="failing"):
        psf_defect_series(gaussian_pair(), ParamPoint.parse("2,2,3/4,3/4"), [4])
    with pytest.raises(ValueError):
        psf_defect_series(gaussian_pair(), ParamPoint.parse("2,2,1/2,1"), [4])


def test_step_pair_defect_shrinks():
    k = np.arange(129)
    spec = StepSpec((k + 1.0) ** -3, 1.0 + k / 2)
    s = psf_defect_series(step_pair(spec), ParamPoint.parse("2,2,2,2"), [8, 32, 128])
    d = np.abs(s.defects())
    assert d[-1] < d[0]
