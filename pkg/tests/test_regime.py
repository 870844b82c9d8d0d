import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from psflab.acceptance import REGIME_TABLE
from psflab.regime import (
    INF,
    AbsTag,
    ParamPoint,
    PsfTag,
    as_ext,
    classify_abs,
    classify_abs_two_sided,
    classify_psf,
    conjugate,
    format_ext,
    gamma_exponent,
    product_position,
    Relation,
    seeded_points,
)


@pytest.mark.parametrize("e,expected", [(1, INF), (2, Fraction(2)), (4, Fraction(4, 3)),
                                        (INF, Fraction(1)), ("3/2", Fraction(3))])
def test_conjugate(e, expected):
    assert conjugate(e) == expected


def test_conjugate_rejects_below_one():
    with pytest.raises(ValueError):
        conjugate(Fraction(1, 2))


def test_infinity_is_a_tag_not_a_float():
    assert as_ext("inf") is INF
    assert as_ext(math.inf) is INF
    assert ParamPoint.parse("inf,2,1,1").p is INF
    assert format_ext(INF) == "inf"
    assert format_ext(Fraction(3, 4)) == "3/4"


def test_rejects_exponent_below_one():
    with pytest.raises(ValueError):
        ParamPoint("1/2", 2, 1, 1)


@pytest.mark.parametrize("text,tag", [
    ("inf,inf,2,2", PsfTag.HOLDS),
    ("1,1,2,1/2", PsfTag.HOLDS_EQUALITY_11),
    ("2,2,1,1", PsfTag.CONDITIONAL_EQUALITY),
    ("2,2,3/4,3/4", PsfTag.FAILS),
])
def test_classify_psf_examples(text, tag):
    assert classify_psf(ParamPoint.parse(text)).tag is tag


@pytest.mark.parametrize("text,tag", [
    ("1,1,2,1/2", AbsTag.ABSOLUTELY_CONVERGES),
    ("1,2,1,1", AbsTag.MAY_DIVERGE),
    ("2,2,2,2", AbsTag.ABSOLUTELY_CONVERGES),
])
def test_classify_abs_examples(text, tag):
    assert classify_abs(ParamPoint.parse(text)) is tag


@pytest.mark.parametrize("text,tag", [
    ("1,1,1,1", AbsTag.ABSOLUTELY_CONVERGES),
    ("2,4,2,2", AbsTag.ABSOLUTELY_CONVERGES),
    ("2,4,1,1", AbsTag.MAY_DIVERGE),
])
def test_classify_two_sided_examples(text, tag):
    assert classify_abs_two_sided(ParamPoint.parse(text)) is tag


@pytest.mark.parametrize("row", REGIME_TABLE, ids=[r[0] for r in REGIME_TABLE])
def test_hand_checked_table(row):
    text, tag, gamma, one, two = row
    pt = ParamPoint.parse(text)
    v = classify_psf(pt)
    assert v.tag.value == tag
    assert (None if v.gamma is None else format_ext(v.gamma)) == gamma
    assert classify_abs(pt).value == one
    assert classify_abs_two_sided(pt).value == two


def test_table_covers_every_branch():
    tags = {r[1] for r in REGIME_TABLE}
    assert tags == {"Holds", "HoldsEquality11", "ConditionalEquality", "Fails", "Inadmissible"}
    assert sum(r[1] in ("HoldsEquality11", "ConditionalEquality") for r in REGIME_TABLE) >= 6
    assert any("inf" in r[0] for r in REGIME_TABLE)
    # a point where one-sided and two-sided absolute convergence differ
    assert any(r[3] != r[4] for r in REGIME_TABLE)


def test_equality_is_exact():
    pos = product_position(ParamPoint.parse("2,2,1,1"))
    assert pos.relation_psf is Relation.EQUAL
    assert pos.lhs == Fraction(1, 4)


@pytest.mark.parametrize("text,gamma", [("2,2,1,1", 1), ("2,2,2,2/3", 3), ("2,1,3/2,1/2", 2)])
def test_gamma_exponent(text, gamma):
    assert gamma_exponent(ParamPoint.parse(text)) == gamma


@pytest.mark.parametrize("text", ["1,inf,1,2", "2,2,2,2", "1,1,1,1"])
def test_gamma_rejected_off_surface(text):
    with pytest.raises(ValueError):
        gamma_exponent(ParamPoint.parse(text))


def test_inadmissible_is_a_verdict():
    assert classify_psf(ParamPoint.parse("2,2,1/2,1")).tag is PsfTag.INADMISSIBLE
    assert classify_abs(ParamPoint.parse("2,2,1/2,1")) is AbsTag.INADMISSIBLE


exponents = st.sampled_from(["1", "3/2", "2", "3", "4", "inf"])
weights = st.fractions(min_value=Fraction(1, 16), max_value=6, max_denominator=16)


@given(exponents, exponents, weights, weights)
def test_swap_symmetry(p, q, a, b):
    pt = ParamPoint(p, q, a, b)
    assert classify_psf(pt).tag is classify_psf(pt.swapped()).tag


@given(exponents, exponents, weights, weights, st.fractions(min_value=0, max_value=2))
def test_monotone_in_weights(p, q, a, b, bump):
    before = classify_psf(ParamPoint(p, q, a, b)).tag
    after = classify_psf(ParamPoint(p, q, a + bump, b)).tag
    assert not (before is PsfTag.HOLDS and after is PsfTag.FAILS)


@given(exponents, exponents, weights, weights)
def test_two_sided_implies_one_sided(p, q, a, b):
    pt = ParamPoint(p, q, a, b)
    if classify_abs_two_sided(pt) is AbsTag.ABSOLUTELY_CONVERGES:
        assert classify_abs(pt) is AbsTag.ABSOLUTELY_CONVERGES


@given(exponents, exponents, weights, weights)
def test_gamma_positive(p, q, a, b):
    v = classify_psf(ParamPoint(p, q, a, b))
    if v.tag is PsfTag.CONDITIONAL_EQUALITY:
        assert v.gamma > 0


def test_seeded_points_reproducible():
    a = seeded_points(PsfTag.FAILS, 5, 7)
    b = seeded_points(PsfTag.FAILS, 5, 7)
    assert a == b
    assert all(classify_psf(p).tag is PsfTag.FAILS for p in a)
    assert len({str(p) for p in a}) == 5
