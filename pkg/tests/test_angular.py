from __future__ import annotations

import json
import math

import mpmath as mp
import numpy as np
import pytest

from regfrac.angular import (
    angular_mesh,
    angular_spectrum,
    assemble_angular,
    beta_from_lambda,
    eigen_solve,
    extrapolated_beta,
    extrapolated_lambda,
)
from regfrac.exponents import critical_exponents
from regfrac.mesh import graded_mesh
from regfrac.special import DomainError, FracOrder


def test_half_uniform_is_standard_fem():
    n = 16
    mesh = angular_mesh(n, 1.0)
    sysm = assemble_angular(0.5, mesh)
    h = math.pi / n
    K = (2 * np.eye(n + 1) - np.eye(n + 1, k=1) - np.eye(n + 1, k=-1)) / h
    K[0, 0] = K[-1, -1] = 1 / h
    K[0, 0] -= 1 / math.pi
    np.testing.assert_allclose(sysm.K, K[:-1, :-1], atol=1e-12)
    assert sysm.robin == pytest.approx(1 / math.pi, rel=1e-14)
    M = (4 * np.eye(n + 1) + np.eye(n + 1, k=1) + np.eye(n + 1, k=-1)) * h / 6
    M[0, 0] = M[-1, -1] = h / 3
    np.testing.assert_allclose(sysm.M, M[:-1, :-1], atol=1e-12)


def test_pi_row_eliminated():
    mesh = angular_mesh(8)
    sysm = assemble_angular(0.3, mesh)
    assert sysm.K.shape == (8, 8) and sysm.M.shape == (8, 8)
    np.testing.assert_array_equal(sysm.nodes, mesh.nodes[:-1])


def test_two_element_entries_mpmath():
    s = 0.7
    sysm = assemble_angular(s, angular_mesh(2))
    mp.mp.dps = 30
    h = mp.pi / 2
    w = lambda t: mp.sin(t) ** (1 - 2 * s)  # noqa: E731
    phi0 = lambda t: 1 - t / h  # noqa: E731
    phi1 = lambda t: t / h if t <= h else 2 - t / h  # noqa: E731
    fo = FracOrder(s)
    robin = fo.kappabar * fo.a_s
    k00 = mp.quad(w, [0, h]) / h**2 - robin
    k11 = mp.quad(w, [0, h, mp.pi]) / h**2
    k01 = -mp.quad(w, [0, h]) / h**2
    m00 = mp.quad(lambda t: w(t) * phi0(t) ** 2, [0, h])
    m01 = mp.quad(lambda t: w(t) * phi0(t) * phi1(t), [0, h])
    m11 = mp.quad(lambda t: w(t) * phi1(t) ** 2, [0, h, mp.pi])
    np.testing.assert_allclose(sysm.K, np.array([[k00, k01], [k01, k11]], float), rtol=1e-10)
    np.testing.assert_allclose(sysm.M, np.array([[m00, m01], [m01, m11]], float), rtol=1e-10)


def test_mesh_must_span_half_circle():
    with pytest.raises(DomainError):
        assemble_angular(0.5, graded_mesh(8, 2.0))


@pytest.mark.parametrize("s", [0.3, 0.5, 0.75])
def test_eigenpairs_orthonormal_and_signed(s):
    sysm = assemble_angular(s, angular_mesh(128))
    pairs = eigen_solve(sysm, 4)
    V = np.array([p.psi_values[:-1] for p in pairs]).T
    G = V.T @ sysm.M @ V
    np.testing.assert_allclose(np.diag(G), 1.0, atol=1e-10)
    assert np.abs(G - np.diag(np.diag(G))).max() < 1e-8
    lam = [p.lambda_k for p in pairs]
    assert lam == sorted(lam)
    for p in pairs:
        assert p.psi_values[-1] == 0.0
        assert p.psi_values[0] >= 0


def test_ground_state_half_is_linear():
    mesh = angular_mesh(64, 1.0)
    p0 = eigen_solve(assemble_angular(0.5, mesh), 1)[0]
    ref = math.pi - mesh.nodes
    ref *= p0.psi_values[0] / ref[0]
    np.testing.assert_allclose(p0.psi_values, ref, atol=1e-8)
    assert abs(p0.lambda_k) < 1e-10


@pytest.mark.parametrize("s", [0.4, 0.6, 0.75])
def test_lambda0_vanishes_under_refinement(s):
    ns = (64, 128, 256, 512)
    l0 = [abs(angular_spectrum(s, n, 2).lambdas[0]) for n in ns]
    C = l0[0] * ns[0]
    assert all(v * n <= C * 1.0001 for v, n in zip(l0, ns))
    l1 = angular_spectrum(s, 512, 2).lambdas[1]
    assert l0[-1] <= 1e-3 * l1


def test_lambda1_half_is_beta1_squared():
    b1 = critical_exponents(0.5, 1).beta[1]
    assert extrapolated_lambda(0.5) == pytest.approx(b1**2, rel=1e-6)
    assert angular_spectrum(0.5, 256).lambdas[1] == pytest.approx(2.0457, abs=1e-3)


@pytest.mark.parametrize("s", [0.4, 0.5, 0.6, 0.75])
def test_extrapolated_beta_matches_root_finder(s):
    b1 = critical_exponents(s, 1).beta[1]
    assert extrapolated_beta(s) == pytest.approx(b1, rel=1e-3)


def test_beta_from_lambda_examples():
    for s in (0.2, 0.5, 0.8):
        assert beta_from_lambda(0.0, s) == pytest.approx(max(2 * s - 1, 0), abs=1e-15)
    assert beta_from_lambda(2.0, 0.5) == pytest.approx(math.sqrt(2), rel=1e-15)
    # lambda = beta (beta - (2s-1)) inverts the map
    for s, b in ((0.3, 1.2), (0.75, 1.8)):
        assert beta_from_lambda(b * (b - (2 * s - 1)), s) == pytest.approx(b, rel=1e-14)


def test_beta_from_lambda_radicand():
    s = 0.75
    d2 = 0.25**2
    assert beta_from_lambda(-d2 - 1e-13, s) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        beta_from_lambda(-d2 - 1e-6, s)


def test_spectrum_serialization():
    sp = angular_spectrum(0.6, 32, 2)
    d = json.loads(sp.to_json())
    assert d["s"] == 0.6 and d["n"] == 32 and len(d["lambdas"]) == 2 and len(d["betas"]) == 2
    rows = sp.to_csv().strip().splitlines()
    assert rows[0] == "theta,psi0,psi1"
    assert len(rows) == 34


def test_too_many_modes():
    with pytest.raises(ValueError):
        eigen_solve(assemble_angular(0.5, angular_mesh(4)), 5)
