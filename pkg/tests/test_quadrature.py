import math

import numpy as np
import pytest

from zctiming.quadrature import G_WEIGHTS, K_WEIGHTS, NODES, QuadratureError, integrate


def test_rule_constants():
    assert K_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert G_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    np.testing.assert_allclose(NODES, -NODES[::-1], atol=0)
    # Kronrod 15 is exact to degree 22, Gauss 7 to degree 13
    for p in range(0, 23, 2):
        assert np.dot(K_WEIGHTS, NODES**p) == pytest.approx(2 / (p + 1), abs=1e-14)
    for p in range(0, 14, 2):
        assert np.dot(G_WEIGHTS, NODES**p) == pytest.approx(2 / (p + 1), abs=1e-14)


def test_scalar_integrands():
    assert integrate(np.exp, 0, 1).value == pytest.approx(math.e - 1, rel=1e-12)
    r = integrate(lambda x: np.sqrt(x), 0, 1, epsrel=1e-10)
    assert r.value == pytest.approx(2 / 3, rel=1e-9)
    assert r.intervals > 1 and r.evaluations % 15 == 0


def test_vector_integrand():
    k = np.arange(1, 5)
    r = integrate(lambda x: np.cos(np.outer(x, k)), 0, math.pi / 2)
    np.testing.assert_allclose(r.value, np.sin(k * math.pi / 2) / k, atol=1e-12)


def test_breakpoints_find_narrow_peak():
    f = lambda x: np.exp(-((x - 7.3) / 1e-3) ** 2)
    exact = 1e-3 * math.sqrt(math.pi)
    # without nodes near the peak the rule sees a zero function
    assert integrate(f, 0, 10).value < 1e-10
    r = integrate(f, 0, 10, points=[7.29, 7.3, 7.31])
    assert r.value == pytest.approx(exact, rel=1e-8)


def test_errors():
    with pytest.raises(ValueError):
        integrate(np.exp, 1, 1)
    with pytest.raises(QuadratureError):
        integrate(lambda x: 1 / (x - 0.5), 0, 1)
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0, 1, limit=20)
