import math

import numpy as np
import pytest

from psflab.norms import WeightSpec, partial_sum_norms
from psflab.regime import ParamPoint, PsfTag, classify_psf
from psflab.weights import (
    Verdict,
    WeightPair,
    balanced_scale_exponent,
    convergence_margin,
    corollary_supremum,
    critical_scale_exponents,
    dirichlet_norms,
    power_scales,
    power_weight_pair,
    verdict,
)

N_LIST = [16, 32, 64, 128, 256]


@pytest.fixture
def linear_pair():
    return WeightPair(WeightSpec.shifted(1), WeightSpec.shifted(1), power_scales(1), power_scales(1))


def test_dirichlet_condition_by_hand(linear_pair):
    # q' = 2, Delta_k = 1 + k, N = 3: body over k < 3 plus the tail from Delta_3/2 - 1 = 1
    body = math.sqrt(sum((1 + (1 + k) / 2) ** -2 * (2 * k + 1) for k in range(3)))
    tail = math.sqrt(1 / 2) * math.sqrt(7)
    assert body + tail == pytest.approx(3.283076704341295, rel=1e-15)
    assert corollary_supremum(linear_pair, 2, 2, 2, [3])[0] == pytest.approx(3.283076704341295,
                                                                                 rel=1e-12)


def test_bump_condition_is_cumulative(linear_pair):
    vals = corollary_supremum(linear_pair, 1, 2, 2, [0, 1, 2, 3])
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("r", [1, 1.5, 2, 3, math.inf])
def test_dirichlet_norms(r):
    got = dirichlet_norms(6, r)
    ref = partial_sum_norms(np.ones(13), r, "head")[2 * np.arange(7)]
    assert np.allclose(got, ref, rtol=1e-6)
    assert got[0] == pytest.approx(1.0)


def test_decreasing_weight_rejected():
    with pytest.raises(ValueError):
        WeightPair(WeightSpec.shifted(-1), WeightSpec.shifted(1), power_scales(1), power_scales(1))


def test_scales_must_increase(linear_pair):
    flat = WeightPair(linear_pair.u, linear_pair.v, lambda k: np.ones_like(k, dtype=float),
                      power_scales(1))
    with pytest.raises(ValueError):
        flat.scales(4)


def test_constant_weights_grow():
    pair = WeightPair(WeightSpec.constant(), WeightSpec.constant(), power_scales(1), power_scales(1))
    rep = verdict(pair, 2, 2, N_LIST)
    assert rep.verdict is Verdict.GROWING
    assert rep.diverging == (2, 4)
    assert "not checked" in rep.unchecked


def test_verdict_is_scale_invariant():
    pt = ParamPoint.parse("2,2,2,2")
    pair = power_weight_pair(pt)
    doubled = WeightPair(pair.u.scaled(2), pair.v, pair.delta, pair.delta_tilde)
    a = verdict(pair, 2, 2, N_LIST)
    b = verdict(doubled, 2, 2, N_LIST)
    assert a.verdict is b.verdict
    assert np.allclose(np.array(b.values[0]), np.array(a.values[0]) / 2)
    assert np.allclose(np.array(b.values[3]), np.array(a.values[3]) / 2)


def test_holds_and_fails_points():
    good = ParamPoint.parse("2,2,2,2")
    bad = ParamPoint.parse("2,2,3/4,3/4")
    assert classify_psf(bad).tag is PsfTag.FAILS
    assert verdict(power_weight_pair(good), 2, 2, N_LIST).verdict is Verdict.LIKELY_BOUNDED
    assert verdict(power_weight_pair(bad), 2, 2, N_LIST).verdict is Verdict.GROWING


def test_critical_exponents():
    lo, hi = critical_scale_exponents(ParamPoint.parse("2,2,2,2"))
    assert (lo, hi) == (pytest.approx(1 / 3), pytest.approx(3.0))
    assert critical_scale_exponents(ParamPoint.parse("inf,2,2,2"))[1] == math.inf


def test_balanced_exponent():
    B, margin = balanced_scale_exponent(ParamPoint.parse("2,2,2,2"))
    # decay margins 3 - B and 3 B - 1 meet at B = 1
    assert B == pytest.approx(1.0) and margin == pytest.approx(2.0)
    lo, hi = critical_scale_exponents(ParamPoint.parse("2,2,2,2"))
    assert lo < B < hi
    B, margin = balanced_scale_exponent(ParamPoint.parse("2,2,3/4,3/4"))
    assert margin < 0
    m, Bmin = convergence_margin(ParamPoint.parse("2,2,2,2"))
    assert m == pytest.approx(2.0) and Bmin == pytest.approx(1.0)


def test_inadmissible_point_rejected():
    with pytest.raises(ValueError):
        balanced_scale_exponent(ParamPoint.parse("4,4,1/2,1/2"))
