import numpy as np
import pytest

from zctiming.sequences import (
    cyclic_shift,
    lfsr_cycle_length,
    mod_index,
    pn_generate,
    validate_zc_params,
    zc_generate,
)

from oracles import lfsr_period_ref, lfsr_ref, zc_ref


@pytest.mark.parametrize("N,mu", [(839, 140), (839, 367), (839, 29), (139, 1), (3, 2)])
def test_zc_matches_definition(N, mu):
    x = np.asarray(zc_generate(N, mu))
    np.testing.assert_allclose(x, zc_ref(N, mu), atol=1e-12)


def test_zc_first_sample_and_unit_modulus():
    x = np.asarray(zc_generate(839, 140))
    assert x[0] == 1
    np.testing.assert_allclose(np.abs(x), 1.0, atol=1e-14)


def test_zc_is_read_only():
    x = np.asarray(zc_generate(139, 5))
    with pytest.raises(ValueError):
        x[0] = 0


@pytest.mark.parametrize("N,mu,msg", [
    (838, 3, "N must be odd"),
    (1, 1, "N must be odd"),
    (839, 0, "mu must be an integer"),
    (839, 839, "mu must be an integer"),
    (15, 5, "coprime"),
    (839.5, 3, "N must be odd"),
])
def test_zc_rejects_bad_params(N, mu, msg):
    with pytest.raises(ValueError, match=msg):
        validate_zc_params(N, mu)
    with pytest.raises(ValueError, match=msg):
        zc_generate(N, mu)


def test_mod_index_negative():
    assert mod_index(-1, 839) == 838
    np.testing.assert_array_equal(mod_index(np.array([-840, 0, 839]), 839), [838, 0, 0])
    with pytest.raises(ValueError):
        mod_index(1, 0)


def test_cyclic_shift():
    x = np.arange(7)
    np.testing.assert_array_equal(cyclic_shift(x, 2), [2, 3, 4, 5, 6, 0, 1])
    np.testing.assert_array_equal(cyclic_shift(x, -1), [6, 0, 1, 2, 3, 4, 5])


@pytest.mark.parametrize("degree,taps", [(3, (3, 2)), (4, (4, 3)), (5, (5, 3)), (7, (7, 6)), (10, (10, 7))])
def test_lfsr_maximal_length(degree, taps):
    assert lfsr_cycle_length(degree, taps) == 2**degree - 1
    assert lfsr_period_ref(degree, taps) == 2**degree - 1


def test_lfsr_non_maximal_rejected():
    # x^4 + x^2 + 1 is not primitive
    assert lfsr_period_ref(4, (4, 2)) < 15
    with pytest.raises(ValueError, match="maximal-length"):
        pn_generate(4, (4, 2), 10)


@pytest.mark.parametrize("degree,taps", [(5, (5, 3)), (25, (25, 3))])
def test_pn_matches_recurrence(degree, taps):
    n = min(839, 2**degree - 1)
    pn = np.asarray(pn_generate(degree, taps, n))
    bits = np.array(lfsr_ref(degree, taps, n))
    np.testing.assert_array_equal(pn.real, 1 - 2 * bits)
    assert np.all(pn.imag == 0)


def test_pn_default_is_839_of_pm_one():
    pn = pn_generate()
    assert len(pn) == 839 and pn.period == 2**25 - 1
    assert set(np.asarray(pn).real.tolist()) == {-1.0, 1.0}


def test_pn_full_period_balance():
    # an m-sequence has one more 1 than 0 per period
    pn = np.asarray(pn_generate(7, (7, 6), 127)).real
    assert np.sum(pn == -1) == 64 and np.sum(pn == 1) == 63


@pytest.mark.parametrize("kw,msg", [
    (dict(degree=5, taps=(), length=5), "non-empty"),
    (dict(degree=5, taps=(4, 3), length=5), "include degree"),
    (dict(degree=5, taps=(5, 3), length=32), "length must be"),
    (dict(degree=5, taps=(5, 3), length=0), "length must be"),
])
def test_pn_validation(kw, msg):
    with pytest.raises(ValueError, match=msg):
        pn_generate(**kw)
