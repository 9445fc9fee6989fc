from __future__ import annotations

import json
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from regfrac.exponents import (
    BracketError,
    ExponentTable,
    alpha_critical,
    critical_exponents,
    exponent_atlas_csv,
    verify_root,
)
from regfrac.special import DomainError, h1, h2, regional_power_coeff

SWEEP = (0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9)


def tan_root(m: int) -> float:
    """m-th positive solution of tan(pi b) = pi b."""
    x = brentq(lambda x: math.sin(x) - x * math.cos(x), m * math.pi + 1e-9, (m + 0.5) * math.pi - 1e-12,
               xtol=1e-15, rtol=1e-15)
    return x / math.pi


def test_half_matches_tangent_equation():
    t = critical_exponents(0.5, 3)
    for k in (1, 2, 3):
        assert abs(t.beta[k] - tan_root(k)) < 1e-9
    assert t.beta[1] == pytest.approx(1.4302967, abs=1e-7)
    assert t.beta[2] == pytest.approx(2.4590, abs=1e-4)
    assert t.beta[3] == pytest.approx(3.47089, abs=1e-5)


def test_beta0_exact():
    assert critical_exponents(0.75, 1).beta[0] == 0.5
    assert critical_exponents(0.3, 1).beta[0] == 0.0


def test_small_s_brackets():
    t = critical_exponents(0.3, 3)
    for k in (1, 2, 3):
        assert k < t.beta[k] < k + 0.3


@pytest.mark.parametrize("s", SWEEP)
def test_table_invariants(s):
    t = critical_exponents(s, 5, tol=1e-10)
    assert t.check_invariants() == []
    assert t.diagnostics == []
    for k in range(1, 6):
        assert t.residuals[k] < 10 * 1e-10
        assert t.creg_residuals[k] < 1e-7
        lo, hi = t.brackets[k]
        assert lo < t.beta[k] < hi


@pytest.mark.parametrize("s", SWEEP)
def test_roots_are_coefficient_zeros(s):
    t = critical_exponents(s, 4)
    for b in t.beta[1:]:
        assert abs(h1(b, s) - h2(b, s)) < 1e-10
        assert abs(regional_power_coeff(b, s)) < 1e-9


def test_alpha_examples():
    assert alpha_critical(0.5) == pytest.approx(tan_root(1) - 1, abs=1e-10)
    a = alpha_critical(0.5)
    # first positive solution of 1 + a = tan(pi a) / pi
    assert 1 + a == pytest.approx(math.tan(math.pi * a) / math.pi, rel=1e-9)
    assert 0 < alpha_critical(0.9) < 0.1
    assert 0.4 + alpha_critical(0.2) > 1


def test_beta1_continuous_in_s():
    s = np.arange(0.01, 1.0, 0.01)
    b = np.array([critical_exponents(v, 1).beta[1] for v in s])
    assert np.max(np.abs(np.diff(b))) < 0.05
    assert np.all((b > 1) & (b < 1 + s))


def test_invalid_arguments():
    with pytest.raises(DomainError):
        critical_exponents(1.2, 2)
    with pytest.raises(DomainError):
        critical_exponents(0.5, 0)
    with pytest.raises(DomainError):
        critical_exponents(0.5, 2, tol=0)


def test_bracket_failure_is_reported(monkeypatch):
    import regfrac.exponents as ex

    monkeypatch.setattr(ex, "g", lambda b, s: 1.0)
    with pytest.raises(BracketError, match="no sign change"):
        ex.critical_exponents(0.5, 1)


def test_verify_root():
    r0 = verify_root(0.5, 0.75)
    assert r0.creg_residual < 1e-10
    b1 = critical_exponents(0.5, 1).beta[1]
    r1 = verify_root(b1, 0.5)
    assert r1.h_residual < 1e-8 and r1.creg_residual < 1e-8 and r1.ok(1e-8)
    r2 = verify_root(b1 + 0.1, 0.5)
    assert r2.h_residual > 1e-2 and r2.creg_residual > 1e-2 and not r2.ok(1e-8)
    assert verify_root(b1, 0.5, eigen_beta=1.43).beta_from_eigen == 1.43


def test_json_round_trip():
    t = critical_exponents(0.6, 3)
    d = json.loads(t.to_json())
    assert set(d) >= {"s", "beta", "alpha_s", "residuals", "brackets"}
    back = ExponentTable.from_dict(d)
    assert back == t


def test_atlas_csv():
    txt = exponent_atlas_csv([0.25, 0.5], K=2)
    rows = [r.split(",") for r in txt.strip().splitlines()]
    assert rows[0] == ["s", "alpha_s", "beta0", "beta1", "beta2"]
    assert float(rows[2][3]) == pytest.approx(tan_root(1), abs=1e-12)
