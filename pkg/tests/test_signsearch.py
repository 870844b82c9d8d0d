import itertools

import numpy as np
import pytest

from psflab.norms import partial_sum_norms
from psflab.signsearch import (
    SignSearchProblem,
    expectation_ratio,
    khintchine_constant,
    khintchine_objective,
    l2_baseline,
    random_signs,
    salem_zygmund_check,
    search_signs,
    sup_ratios,
)


def test_khintchine_constant_values():
    assert khintchine_constant(2) == pytest.approx(1.0)
    assert khintchine_constant(4) == pytest.approx(3 ** 0.25)
    assert khintchine_constant(6) == pytest.approx(15 ** (1 / 6))


def test_objective_matches_partial_sum_norms():
    c = np.array([1.0, 0.5, -0.25, 0.8, 0.3])
    w = np.array([1.0, 2.0, 0.5, 1.0, 3.0])
    prob = SignSearchProblem(c, w, 4)
    signs = np.array([1, -1, 1, 1, -1.0])
    heads = partial_sum_norms(c * signs, 4, "head")
    assert khintchine_objective(signs, prob) == pytest.approx(float(w @ heads ** 4) ** 0.25, rel=1e-12)


def test_q2_objective_is_sign_independent():
    rng = np.random.default_rng(3)
    prob = SignSearchProblem(rng.normal(size=9), rng.uniform(size=9), 2)
    vals = [khintchine_objective(s, prob) for s in random_signs(9, 8, 1)]
    assert np.ptp(vals) <= 1e-12 * max(vals)
    assert vals[0] == pytest.approx(l2_baseline(prob), rel=1e-12)


def test_random_signs_do_not_depend_on_batching():
    a = random_signs(10, 6, 42)
    b = random_signs(10, 3, 42)
    assert np.array_equal(a[:3], b)
    assert set(np.unique(a)) <= {-1.0, 1.0}


def test_exhaustive_finds_the_minimum():
    c = np.array([1.0, 0.9, 0.7, 0.4, 0.3, 0.2])
    prob = SignSearchProblem(c, np.ones(6), 4)
    res = search_signs(prob, exhaustive=True)
    brute = min(khintchine_objective((1.0,) + s, prob)
                for s in itertools.product((1.0, -1.0), repeat=5))
    assert res.objective == pytest.approx(brute, rel=1e-12)
    assert res.trial_objectives.size == 32
    assert res.signs[0] == 1.0


def test_random_search_improves_on_draws():
    rng = np.random.default_rng(0)
    prob = SignSearchProblem(rng.uniform(0.5, 1, 24), np.ones(24), 4, trials=16, seed=5)
    res = search_signs(prob)
    assert res.objective <= float(np.min(res.trial_objectives)) + 1e-12
    assert res.ratio < khintchine_constant(4)
    assert np.array_equal(search_signs(prob).signs, res.signs)


def test_exhaustive_limit():
    prob = SignSearchProblem(np.ones(30), np.ones(30), 4)
    with pytest.raises(ValueError):
        search_signs(prob, exhaustive=True)


def test_expectation_ratio_near_one():
    prob = SignSearchProblem(np.ones(32), np.ones(32), 4, seed=2)
    assert 0.5 < expectation_ratio(prob, draws=32) < 1.1


def test_sup_ratios():
    c = np.ones(4)
    r = sup_ratios(c, np.ones(4))
    # all-plus head sums peak at t = 0 with value k + 1
    k = np.arange(4)
    assert np.allclose(r, (k + 1) / (np.sqrt(np.log(k + 2)) * np.sqrt(k + 1)))


def test_salem_zygmund_keeps_the_best_draw():
    c = np.ones(64)
    res = salem_zygmund_check(c, trials=8, seed=1)
    worst = [np.max(sup_ratios(c, s)) for s in random_signs(64, 8, 1)]
    assert res.worst == pytest.approx(min(worst))
    assert res.worst < 3.0
