"""Angular reduction of the weighted extension problem.

On (0, pi) with weight w = sin(theta)^(1-2s):

    -(w psi')' = lam w psi,   -w psi'(0) = kappabar_s a_s psi(0),   psi(pi) = 0,

discretized with P1 hats.  The Robin term is a rank-one correction of the
stiffness.  Each eigenvalue gives a homogeneity exponent through
beta = (2s-1)/2 + sqrt(lam + ((2s-1)/2)^2).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh

from .mesh import GradedMesh, graded_mesh, uniform_mesh
from .quadrature import gauss_jacobi01, gauss_legendre01
from .special import DomainError, FracOrder, check_order


class EigenError(RuntimeError):
    pass


def angular_mesh(n: int, mu: float = 2.0) -> GradedMesh:
    """P1 mesh of [0, pi] graded toward both ends (mu = 1 gives a uniform mesh)."""
    if mu == 1.0:
        return uniform_mesh(n, 0.0, math.pi)
    return graded_mesh(n, mu, 0.0, math.pi, ends="both")


def _smooth_factor(theta: np.ndarray, p: float, side: str) -> np.ndarray:
    """sin(theta)^p divided by its endpoint power (theta^p or (pi-theta)^p)."""
    d = theta if side == "left" else math.pi - theta
    return np.where(d > 0, np.sin(theta) / np.where(d > 0, d, 1.0), 1.0) ** p


def _element_rules(nodes: np.ndarray, s: float, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-element points t in [0,1] (local coordinate) and weights including sin^(1-2s).

    Returns (t, wts) with shapes (n_el, q).  First/last elements use a Jacobi
    rule carrying the endpoint power; interior elements plain Gauss.
    """
    p = 1.0 - 2.0 * s
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    n_el = len(h)
    tg, wg = gauss_legendre01(q)
    t = np.tile(tg, (n_el, 1))
    theta = a[:, None] + h[:, None] * t
    with np.errstate(divide="ignore", invalid="ignore"):
        wts = h[:, None] * wg[None, :] * np.sin(theta) ** p
    tj, wj = gauss_jacobi01(q, p)
    # left element: theta = h t, weight theta^p = h^p t^p
    t[0] = tj
    th0 = a[0] + h[0] * tj
    wts[0] = h[0] ** (1.0 + p) * wj * _smooth_factor(th0, p, "left")
    # right element: pi - theta = h (1 - t)
    t[-1] = 1.0 - tj
    th1 = a[-1] + h[-1] * t[-1]
    wts[-1] = h[-1] ** (1.0 + p) * wj * _smooth_factor(th1, p, "right")
    return t, wts


@dataclass
class AngularSystem:
    s: float
    mesh: GradedMesh
    K: np.ndarray
    M: np.ndarray
    robin: float

    @property
    def nodes(self) -> np.ndarray:
        """Free nodes (theta = pi eliminated)."""
        return self.mesh.nodes[:-1]


def assemble_angular(s: float, mesh: GradedMesh, q: int = 8) -> AngularSystem:
    """Weighted stiffness (with Robin correction) and mass, pi-row eliminated."""
    s = check_order(s)
    nodes = mesh.nodes
    if abs(nodes[0]) > 0 or abs(nodes[-1] - math.pi) > 1e-14:
        raise DomainError("angular mesh must span [0, pi]")
    n = len(nodes)
    h = np.diff(nodes)
    t, wts = _element_rules(nodes, s, q)
    if not np.all(np.isfinite(wts)):
        raise DomainError("non-finite weighted element integral")
    wint = wts.sum(axis=1)
    m00 = (wts * (1 - t) ** 2).sum(axis=1)
    m01 = (wts * (1 - t) * t).sum(axis=1)
    m11 = (wts * t**2).sum(axis=1)
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    i = np.arange(n - 1)
    k = wint / h**2
    np.add.at(K, (i, i), k)
    np.add.at(K, (i + 1, i + 1), k)
    np.add.at(K, (i, i + 1), -k)
    np.add.at(K, (i + 1, i), -k)
    np.add.at(M, (i, i), m00)
    np.add.at(M, (i + 1, i + 1), m11)
    np.add.at(M, (i, i + 1), m01)
    np.add.at(M, (i + 1, i), m01)
    fo = FracOrder(s)
    robin = fo.kappabar * fo.a_s
    K[0, 0] -= robin
    return AngularSystem(s, mesh, K[:-1, :-1], M[:-1, :-1], robin)


@dataclass
class EigenPair:
    k: int
    lambda_k: float
    psi_values: np.ndarray  # at all mesh nodes, including psi(pi) = 0
    beta: float


def beta_from_lambda(lam: float, s: float, clip: float = 1e-12) -> float:
    """(2s-1)/2 + sqrt(lam + ((2s-1)/2)^2); radicands in (-clip, 0) become 0."""
    d = 0.5 * (2.0 * s - 1.0)
    rad = lam + d * d
    if rad < 0:
        if rad < -clip:
            raise DomainError(f"negative radicand {rad:.3e} in beta_from_lambda")
        rad = 0.0
    return d + math.sqrt(rad)


def eigen_solve(system: AngularSystem, n_modes: int = 3) -> list[EigenPair]:
    dim = system.K.shape[0]
    if not 1 <= n_modes <= dim:
        raise ValueError(f"n_modes must lie in [1, {dim}]")
    # symmetric diagonal scaling; graded meshes give mass entries spanning many decades
    d = 1.0 / np.sqrt(np.diag(system.M))
    Ks = system.K * d[:, None] * d[None, :]
    Ms = system.M * d[:, None] * d[None, :]
    try:
        lam, vec = eigh(Ks, Ms, subset_by_index=[0, n_modes - 1])
    except LinAlgError as exc:
        raise EigenError(f"generalized eigensolve failed (dim={dim}): {exc}") from exc
    vec = vec * d[:, None]
    pairs = []
    for j in range(n_modes):
        v = vec[:, j]
        if v[0] < 0:
            v = -v
        psi = np.append(v, 0.0)
        # small negative lambda_0 is discretization noise; beta is clipped at the radicand
        try:
            beta = beta_from_lambda(float(lam[j]), system.s, clip=1e-6)
        except DomainError:
            beta = math.nan
        pairs.append(EigenPair(j, float(lam[j]), psi, beta))
    return pairs


@dataclass
class AngularSpectrum:
    s: float
    n: int
    mu: float
    lambdas: list[float]
    betas: list[float]
    nodes: np.ndarray = field(repr=False)
    modes: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"s": self.s, "n": self.n, "mu": self.mu, "lambdas": self.lambdas, "betas": self.betas}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta"] + [f"psi{k}" for k in range(len(self.lambdas))])
        for th, row in zip(self.nodes, self.modes.T):
            w.writerow([f"{th:.15g}"] + [f"{v:.15g}" for v in row])
        return buf.getvalue()


def angular_spectrum(s: float, n: int = 256, n_modes: int = 3, mu: float = 2.0) -> AngularSpectrum:
    mesh = angular_mesh(n, mu)
    pairs = eigen_solve(assemble_angular(s, mesh), n_modes)
    return AngularSpectrum(
        s=float(s),
        n=n,
        mu=mu,
        lambdas=[p.lambda_k for p in pairs],
        betas=[p.beta for p in pairs],
        nodes=mesh.nodes,
        modes=np.array([p.psi_values for p in pairs]),
    )


def richardson(coarse: float, fine: float, order: float = 2.0, ratio: float = 2.0) -> float:
    return fine + (fine - coarse) / (ratio**order - 1.0)


def extrapolated_lambda(s: float, k: int = 1, n: int = 512, mu: float = 2.0, order: float = 2.0) -> float:
    """lambda_k from meshes n/2 and n combined by Richardson extrapolation."""
    lc = angular_spectrum(s, n // 2, k + 1, mu).lambdas[k]
    lf = angular_spectrum(s, n, k + 1, mu).lambdas[k]
    return richardson(lc, lf, order)


def extrapolated_beta(s: float, k: int = 1, n: int = 512, mu: float = 2.0) -> float:
    return beta_from_lambda(extrapolated_lambda(s, k, n, mu), s)
