from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from regfrac.special import (
    S_MAX,
    DomainError,
    FracOrder,
    PoleError,
    c1s_reflection,
    extension_constant,
    full_power_coeff,
    full_power_coeff_quotient,
    h1,
    h2,
    hardy_coefficient,
    kappa_s,
    normalization_constant,
    regional_power_coeff,
)

mp.mp.dps = 30
SWEEP = (0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9)


def mp_cNs(N, s):
    s = mp.mpf(s)
    return s * 4**s * mp.gamma(mp.mpf(N) / 2 + s) / (mp.pi ** (mp.mpf(N) / 2) * mp.gamma(1 - s))


# -- constants ---------------------------------------------------------------


def test_c1_half_is_one_over_pi():
    assert normalization_constant(1, 0.5) == pytest.approx(1 / math.pi, rel=1e-15)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("s", SWEEP)
def test_cNs_matches_mpmath(N, s):
    assert normalization_constant(N, s) == pytest.approx(float(mp_cNs(N, s)), rel=1e-13)


def test_c2_three_quarters():
    assert normalization_constant(2, 0.75) == pytest.approx(float(mp_cNs(2, 0.75)), rel=1e-14)


def test_near_one_finite_then_rejected():
    # 1/Gamma(1-s) vanishes at s = 1, so c_{1,s} ~ 2(1-s) tends to 0
    v = normalization_constant(1, S_MAX)
    assert math.isfinite(v) and v > 0
    assert v == pytest.approx(float(mp_cNs(1, S_MAX)), rel=1e-9)
    assert v == pytest.approx(2 * (1 - S_MAX), rel=1e-5)
    with pytest.raises(DomainError):
        normalization_constant(1, 1 - 1e-7)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            normalization_constant(1, bad)


@pytest.mark.parametrize("s", np.linspace(0.01, 0.99, 40))
def test_c1s_two_routes(s):
    assert normalization_constant(1, s) == pytest.approx(c1s_reflection(s), rel=1e-12)


@pytest.mark.parametrize("s", SWEEP)
def test_frac_order_fields(s):
    fo = FracOrder(s)
    assert fo.a_s == fo.c1s / (2 * s)
    assert fo.c1s > 0 and fo.a_s > 0 and fo.kappabar > 0
    assert fo.cNs(2) == normalization_constant(2, s)
    ref = mp.gamma(1 - mp.mpf(s)) / (2 ** (2 * mp.mpf(s) - 1) * mp.gamma(mp.mpf(s)))
    assert fo.kappabar == pytest.approx(float(ref), rel=1e-13)
    assert extension_constant(s) == fo.kappabar
    assert hardy_coefficient(s) == fo.a_s


def test_frac_order_rejects_out_of_range():
    for bad in (0.0, 1.0, 2.0):
        with pytest.raises(DomainError):
            FracOrder(bad)


# -- h1 / h2 -----------------------------------------------------------------


@pytest.mark.parametrize("s", [0.1, 0.3, 0.45, 0.55, 0.8])
def test_h1_h2_at_zero(s):
    ref = math.pi / math.sin(2 * math.pi * s)
    if 2 * s - 1 < 0:
        assert h1(0.0, s) == pytest.approx(ref, rel=1e-12)
    assert h2(0.0, s) == pytest.approx(ref, rel=1e-12)


def test_h1_half_is_reciprocal():
    assert h1(2.0, 0.5) == pytest.approx(0.5, rel=1e-14)
    for b in (0.3, 1.7, 4.2):
        assert h1(b, 0.5) == pytest.approx(1 / b, rel=1e-13)


def test_h1_beta_integral():
    b, s = 3.2, 0.3
    ref, _ = quad(lambda t: t ** (b - 2 * s) * (1 - t) ** (2 * s - 1), 0, 1, epsabs=0, epsrel=1e-13, limit=200)
    assert h1(b, s) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_h1_decreasing_convex(s):
    b = np.linspace(2 * s - 1 + 0.05, 2 * s + 5, 400)
    v = np.array([h1(x, s) for x in b])
    assert np.all(v > 0)
    assert np.all(np.diff(v) < 0)
    assert np.all(np.diff(v, 2) > 0)


def test_h1_domain():
    with pytest.raises(DomainError):
        h1(0.5, 0.75)


@given(st.floats(0.05, 0.95), st.floats(-0.9, 4.0))
@settings(max_examples=200, deadline=None)
def test_h2_periodic(s, b):
    if min(abs((b - 2 * s) - round(b - 2 * s)), abs((b + 1 - 2 * s) - round(b + 1 - 2 * s))) < 1e-3:
        return
    assert h2(b + 1, s) == pytest.approx(h2(b, s), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_h2_zero_at_s_plus_k(k):
    s = 0.35
    assert abs(h2(s + k, s)) < 1e-12


def test_h2_pole():
    with pytest.raises(PoleError):
        h2(1.5, 0.75)
    with pytest.raises(PoleError):
        h2(0.6 + 2 + 1e-10, 0.3)


# -- power coefficients ------------------------------------------------------


@pytest.mark.parametrize("s", SWEEP)
def test_full_coeff_vanishes_at_s(s):
    assert full_power_coeff(s, s) == 0.0 or abs(full_power_coeff(s, s)) < 1e-15


@pytest.mark.parametrize("s", [0.55, 0.6, 0.75, 0.9])
def test_full_coeff_removable_point(s):
    b = 2 * s - 1
    assert full_power_coeff(b, s) == pytest.approx(hardy_coefficient(s), rel=1e-13)
    # finite limit from both sides, no blow-up near the removable point
    for d in (1e-7, -1e-7):
        assert full_power_coeff(b + d, s) == pytest.approx(hardy_coefficient(s), rel=1e-5)


def test_full_coeff_example():
    ref = -mp.gamma(2) * mp.gamma(0.5) * mp.sin(mp.pi / 4) / mp.pi
    assert full_power_coeff(1.0, 0.75) == pytest.approx(float(ref), rel=1e-14)
    assert full_power_coeff(1.0, 0.75) == pytest.approx(-0.39894, abs=1e-5)


def test_regional_coeff_examples():
    for s in SWEEP:
        assert abs(regional_power_coeff(0.0, s)) < 1e-12
        if s > 0.5:
            assert abs(regional_power_coeff(2 * s - 1, s)) < 1e-12
    ref = -float(mp_cNs(1, 0.75)) / (2 * 0.75 - 1)
    assert regional_power_coeff(1.0, 0.75) == pytest.approx(ref, rel=1e-13)
    assert regional_power_coeff(1.0, 0.75) == pytest.approx(-0.5984, abs=1e-4)


@given(st.floats(0.05, 0.95), st.floats(-0.95, 5.0))
@settings(max_examples=300, deadline=None)
def test_reflection_matches_quotient(s, b):
    # the quotient form is only trustworthy away from its 0/0 points and poles
    d = b - 2 * s
    if abs(d - round(d)) < 1e-3 or abs(math.sin(math.pi * (b - s))) < 1e-3:
        return
    ref = full_power_coeff_quotient(b, s)
    assert full_power_coeff(b, s) == pytest.approx(ref, rel=1e-9, abs=1e-12)


@given(st.floats(0.05, 0.95), st.floats(-0.95, 5.0))
@settings(max_examples=200, deadline=None)
def test_full_coeff_matches_mpmath(s, b):
    d = b - 2 * s
    if d > -1e-3 and abs(d - round(d)) < 1e-3:
        return
    bm, sm = mp.mpf(b), mp.mpf(s)
    ref = -mp.gamma(bm + 1) * mp.gamma(2 * sm - bm) * mp.sin(mp.pi * (bm - sm)) / mp.pi
    assert full_power_coeff(b, s) == pytest.approx(float(ref), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("b,s", [(1.5, 0.75), (2.5, 0.75), (0.6, 0.3), (3.6, 0.3)])
def test_full_coeff_poles(b, s):
    with pytest.raises(PoleError):
        full_power_coeff(b, s)
    with pytest.raises(PoleError):
        regional_power_coeff(b, s)


def test_full_coeff_domain():
    with pytest.raises(DomainError):
        full_power_coeff(-1.0, 0.5)


@pytest.mark.parametrize("s", [0.1, 0.25, 0.4, 0.6, 0.75, 0.9])
def test_kappa_s_formula(s):
    assert kappa_s(s) == pytest.approx(-normalization_constant(1, s) / (2 * s - 1), rel=1e-12)


@pytest.mark.parametrize("s", [0.55, 0.6, 0.75, 0.9, 0.99])
def test_kappa_s_negative_above_half(s):
    assert kappa_s(s) < 0


def test_kappa_s_pole_at_half():
    # beta = 1 = 2s is a genuine pole of the coefficient
    with pytest.raises(PoleError):
        kappa_s(0.5)
