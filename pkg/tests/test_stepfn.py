import json
import math

import numpy as np
import pytest

from psflab.bump import default_kernel
from psflab.quadrature import gauss_legendre_panels
from psflab.stepfn import (
    StepSpec,
    TrigPolyRef,
    eval_F,
    eval_F_at_integers,
    eval_Fhat,
    eval_Ghat,
    spike_defect,
    spike_defects,
    trig_eval,
)


@pytest.fixture(scope="module")
def kernel():
    return default_kernel()


@pytest.fixture
def spec():
    return StepSpec([1.0, -0.5, 0.25, 0.8], [1.0, 1.7, 2.9, 4.4])


def test_spec_validation():
    with pytest.raises(ValueError):
        StepSpec([1.0], [0.5])
    with pytest.raises(ValueError):
        StepSpec([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        StepSpec([1.0, 1.0], [1.0, 20.0])
    with pytest.raises(ValueError):
        StepSpec([np.nan], [1.0])


def test_spec_round_trip(spec, tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(spec.to_json())
    back = StepSpec.load(path)
    assert np.array_equal(back.c, spec.c) and np.array_equal(back.delta, spec.delta)
    assert json.loads(spec.to_json())["c"] == list(spec.c)


def test_eval_F_matches_naive_sum(spec, kernel):
    x = np.linspace(-3, 7, 401)
    naive = sum(c * d * kernel.phi((x - k) * d) for k, (c, d) in enumerate(zip(spec.c, spec.delta)))
    assert np.allclose(eval_F(spec, kernel, x), naive, atol=1e-11)


def test_integer_values(spec, kernel):
    n = np.arange(-2, 6)
    assert np.allclose(eval_F_at_integers(spec, kernel, n), eval_F(spec, kernel, n.astype(float)),
                       atol=1e-11)


@pytest.mark.parametrize("xi", [0.0, 0.3, 0.9, 1.6, 3.1])
def test_Fhat_is_the_fourier_transform_of_F(spec, kernel, xi):
    x, w = gauss_legendre_panels(-60.0, 64.0, 2480)
    ref = w @ (eval_F(spec, kernel, x) * np.exp(-2j * math.pi * x * xi))
    assert abs(eval_Fhat(spec, kernel, xi) - ref) < 1e-9


def test_Fhat_and_Ghat_supports(spec, kernel):
    assert eval_Fhat(spec, kernel, spec.delta_max) == 0
    assert eval_Ghat(spec, kernel, 0.49 * spec.delta_min) == 0


def test_Fhat_plus_Ghat_is_the_full_polynomial(spec, kernel):
    xi = np.linspace(-3, 3, 37)
    full = trig_eval(TrigPolyRef(spec, "head", spec.N), xi)
    assert np.allclose(eval_Fhat(spec, kernel, xi) + eval_Ghat(spec, kernel, xi), full, atol=1e-13)


def test_head_and_tail_sums(spec):
    xi = np.array([0.1, 0.37])
    head = trig_eval(TrigPolyRef(spec, "head", 1), xi)
    tail = trig_eval(TrigPolyRef(spec, "tail", 2), xi)
    full = trig_eval(TrigPolyRef(spec, "head", 3), xi)
    assert np.allclose(head + tail, full)
    with pytest.raises(IndexError):
        TrigPolyRef(spec, "head", 9)


def test_spike_bound_holds_for_growing_scales(kernel):
    N = 64
    k = np.arange(N + 1)
    spec = StepSpec(np.cos(k), 1.0 + k)
    res = spike_defects(spec, kernel, 4)
    assert res.holds
    assert res.defect.shape == (N + 1,)
    defect, bound = spike_defect(spec, kernel, 40, 4)
    assert defect <= bound
