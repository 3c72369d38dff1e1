from fractions import Fraction

import numpy as np
import pytest

from zctiming.spectrum import (
    ABOVE_HALF,
    AT_HALF,
    HypothesisWindow,
    critical_offset,
    critical_table,
    error_floor,
    floor_for_offset,
    relative_mean_metric,
    shift_offsets,
    timing_spectrum,
)

from oracles import GOLDEN_OFFSETS, critical_ref, spectrum_ref


@pytest.mark.parametrize("mu", [140, 367])
def test_golden_critical_offsets(mu):
    for dk, expected in enumerate(GOLDEN_OFFSETS[mu], start=1):
        assert critical_offset(mu, 839, dk) == expected
        assert critical_offset(mu, 839, -dk) == -expected


def test_critical_offset_matches_search():
    for mu in (1, 29, 140, 367, 838):
        for dk in range(-40, 41):
            if dk:
                assert critical_offset(mu, 839, dk) == critical_ref(mu, 839, dk)


def test_critical_offset_zero_lag():
    with pytest.raises(ValueError):
        critical_offset(140, 839, 0)


def test_critical_table_rows():
    rows = critical_table(140, 839, 15)
    assert len(rows) == 30
    assert rows[:2] == [(1, 140), (-1, -140)]


def test_shift_offsets():
    s = shift_offsets(3, 16)
    assert list(s) == list(range(-3, 13)) and len(s) == 16 and 0 in s
    with pytest.raises(ValueError):
        shift_offsets(16, 16)
    with pytest.raises(ValueError):
        HypothesisWindow(0)


@pytest.mark.parametrize("mu,W", [(140, 16), (367, 20), (29, 20), (367, 16), (5, 7)])
def test_spectrum_matches_double_loop(mu, W):
    assert timing_spectrum(mu, 839, W).bins == spectrum_ref(mu, 839, W)


def test_known_spectra():
    s = timing_spectrum(140, 839, 16)
    assert s[1] == s[-1] == Fraction(5, 8)
    assert s.total_mass == 15
    assert timing_spectrum(367, 839, 20)[1] == Fraction(1, 5)
    assert timing_spectrum(367, 839, 16).min_abs_offset == 52
    assert timing_spectrum(29, 839, 20).min_abs_offset == 29
    assert timing_spectrum(29, 839, 1).bins == {}


def test_spectrum_preconditions():
    with pytest.raises(ValueError):
        timing_spectrum(140, 839, 839)
    with pytest.raises(ValueError):
        timing_spectrum(3, 9, 4)


def test_error_floors():
    s = timing_spectrum(140, 839, 16)
    assert error_floor(s) == error_floor(s, ABOVE_HALF) == 0.625
    assert error_floor(s, AT_HALF) == 0.3125
    assert error_floor(timing_spectrum(367, 839, 16)) == 0.0
    with pytest.raises(ValueError):
        error_floor(s, "sideways")
    assert floor_for_offset(s, 0.3) == 0.0
    assert floor_for_offset(s, -0.5) == 0.3125
    assert floor_for_offset(s, 0.7) == 0.625
    with pytest.raises(ValueError):
        floor_for_offset(s, 1.2)


def test_mass_below():
    s = timing_spectrum(140, 839, 16)
    assert s.mass_below(2) == Fraction(5, 4)
    assert s.mass_below(3) == Fraction(5, 4) + 2 * Fraction(4, 16)


def test_relative_mean_metric():
    # lag 6 of root 140 has critical offset 1
    assert relative_mean_metric(140, 839, 6, 0.7) > 1
    assert relative_mean_metric(140, 839, 6, 0.3) < 1
    assert relative_mean_metric(140, 839, 6, 0.5) == pytest.approx(1.0)
    assert relative_mean_metric(140, 839, 0, 0.4) == 1.0
    assert np.isnan(relative_mean_metric(140, 839, 3, 1.0))
    finite = relative_mean_metric(140, 839, 6, 0.7, eta=1e8)
    assert finite == pytest.approx(relative_mean_metric(140, 839, 6, 0.7), rel=1e-4)
    with pytest.raises(ValueError):
        relative_mean_metric(140, 839, 6, 0.7, eta=0)
