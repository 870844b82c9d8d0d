import math

import numpy as np
import pytest
from scipy import integrate

from psflab.bump import PHI_ZERO, VALIDATED_ORDERS, default_kernel, transition


@pytest.fixture(scope="module")
def kernel():
    return default_kernel()


def test_transition_is_a_partition_of_unity():
    t = np.linspace(0.0, 1.0, 101)
    assert np.allclose(transition(t) + transition(1.0 - t), 1.0, atol=1e-15)
    assert transition(0.0) == 1.0 and transition(1.0) == 0.0


def test_phihat_shape(kernel):
    xi = np.linspace(-1.5, 1.5, 3001)
    v = kernel.phihat(xi)
    assert np.all(v[np.abs(xi) <= 0.5] == 1.0)
    assert np.all(v[np.abs(xi) >= 1.0] == 0.0)
    assert np.allclose(v, v[::-1])
    right = v[xi >= 0]
    assert np.all(np.diff(right) <= 1e-15)


def test_phi_zero(kernel):
    assert abs(kernel.phi(0.0) - PHI_ZERO) < 1e-10


@pytest.mark.parametrize("x", [0.3, 1.0, 2.7, 7.25, 19.5, 60.0])
def test_phi_against_direct_cosine_transform(kernel, x):
    ref, _ = integrate.quad(lambda s: 2 * kernel.phihat(s) * math.cos(2 * math.pi * x * s),
                            0.0, 1.0, limit=400, epsabs=1e-13)
    assert abs(kernel.phi(x) - ref) < 1e-9


def test_phi_even_and_zero_beyond_table(kernel):
    x = np.array([0.1, 3.3, 12.0])
    assert np.array_equal(kernel.phi(x), kernel.phi(-x))
    assert kernel.phi(kernel.xmax + 1.0) == 0.0
    _, err = kernel.phi_with_error(kernel.xmax + 1.0)
    assert 0 < err < 1e-6


@pytest.mark.parametrize("m", VALIDATED_ORDERS)
def test_decay_constants_dominate_table(kernel, m):
    env = np.abs(kernel.values) * (1.0 + kernel.grid) ** m
    assert np.max(env) <= kernel.decay_constant(m)


def test_unvalidated_order_rejected(kernel):
    with pytest.raises(ValueError):
        kernel.decay_constant(max(VALIDATED_ORDERS) + 1)


def test_nan_rejected(kernel):
    with pytest.raises(ValueError):
        kernel.phihat(np.nan)
    with pytest.raises(ValueError):
        kernel.phi(np.nan)
