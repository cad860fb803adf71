import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from combderate.compensator import (
    CompensatorCoeffs,
    compensated_response,
    maxflat_coeffs,
    maxflat_coeffs_derated,
    narrowband_ok,
)
from combderate.response import DEFAULT_M


def test_maxflat_examples():
    c = maxflat_coeffs(3, 4)
    assert c.c0 == Fraction(-15, 128) == c.c2
    assert c.c1 == Fraction(79, 64)
    assert maxflat_coeffs(1, 2).c0 == Fraction(-1, 32)


def test_derated_examples():
    c = maxflat_coeffs_derated(3)
    assert (c.c0, c.c1) == (Fraction(-1, 8), Fraction(5, 4))
    c = maxflat_coeffs_derated(6)
    assert (c.c0, c.c1) == (Fraction(-1, 4), Fraction(3, 2))


@given(st.integers(1, 11), st.integers(2, 10**6))
def test_dc_gain_exactly_one(order, decim):
    for c in (maxflat_coeffs(order, decim), maxflat_coeffs_derated(order)):
        assert c.c0 + c.c1 + c.c2 == 1
        assert c.response(0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("order", range(1, 12))
def test_limit_is_derated_form(order):
    a = maxflat_coeffs(order, 10**6)
    b = maxflat_coeffs_derated(order)
    assert abs(a.c0 - b.c0) <= Fraction(1, 10**10)
    assert abs(float(a.c0) - float(b.c0)) <= 1e-10


def test_coeffs_validate():
    with pytest.raises(ValueError):
        CompensatorCoeffs(Fraction(-1, 8), Fraction(5, 4), Fraction(-1, 9))
    with pytest.raises(ValueError):
        CompensatorCoeffs(Fraction(-1, 8), Fraction(1), Fraction(-1, 8))
    with pytest.raises(ValueError):
        maxflat_coeffs(0, 4)


def test_two_stage_dc():
    assert abs(compensated_response(3, 4, 8, True, 0.0)) == pytest.approx(1.0)


def test_two_stage_fourth_order_droop():
    # oracle: (1 + N w^2/24)(1 - N w^2/24) leaves only w^4 terms
    w = np.geomspace(0.01, 0.1, 25)
    droop = 1 - np.abs(compensated_response(3, 4, 8, True, w))
    slope = np.polyfit(np.log(w), np.log(np.abs(droop)), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)


@pytest.mark.parametrize("two_stage", [False, True])
@pytest.mark.parametrize("order, decim", [(1, 4), (3, 4), (3, 32), (6, 8)])
def test_second_order_term_vanishes(order, decim, two_stage):
    h = 1e-3
    f = lambda w: abs(compensated_response(order, decim, 8, two_stage, w))
    a2 = (f(h) - f(0.0)) / h**2
    assert abs(a2) <= 1e-6


def test_uncompensated_comb_has_second_order_droop():
    from combderate.response import CombSpec, derated_response

    h = 1e-3
    a2 = (abs(derated_response(CombSpec(3, 4), h)) - 1) / h**2
    assert a2 == pytest.approx(-3 / 24, rel=1e-3)


def test_two_stage_spread_is_smaller():
    edge = np.pi / 8
    single = [abs(compensated_response(3, m, 8, False, edge)) for m in DEFAULT_M]
    two = [abs(compensated_response(3, m, 8, True, edge)) for m in DEFAULT_M]
    assert np.ptp(two) <= np.ptp(single) / 2


def test_narrowband_warning():
    assert not narrowband_ok(4) and narrowband_ok(5)
    with pytest.warns(UserWarning, match="narrow-band"):
        compensated_response(3, 4, 4, True, 0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compensated_response(3, 4, 8, True, 0.1)
        compensated_response(3, 4, 2, True, 0.1, warn=False)
