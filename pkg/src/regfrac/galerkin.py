"""P1 Galerkin assembly of singular double-integral bilinear forms on a 1D mesh.

The form is  B(u, v) = int int (u(x)-u(y)) (v(x)-v(y)) k(x, y) dx dy  over
[a,b]^2 with k(x,y) = S(x,y) |x-y|^(-1-2s) and S smooth near the diagonal.
Element pairs are split three ways:

* same element: the P1 difference is exactly phi'(x-y), so the integrand
  reduces to S |x-y|^(1-2s); integrated in (gap, offset) coordinates with a
  Gauss-Jacobi rule in the gap,
* touching elements: Duffy split about the shared node, the radial factor
  u^(2-2s) integrated by Gauss-Jacobi,
* separated elements: tensor Gauss after subdividing each element into
  pieces no longer than half the pair distance.

Each local row sums to zero pointwise, so constants stay in the kernel to
rounding.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .quadrature import gauss_jacobi01, gauss_legendre01, geometric_edges

Kernel = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _scatter(A: np.ndarray, glob: np.ndarray, M: np.ndarray) -> None:
    """A[glob[p,a], glob[p,b]] += M[p,a,b]."""
    k = glob.shape[1]
    rows = np.repeat(glob, k, axis=1).ravel()
    cols = np.tile(glob, (1, k)).ravel()
    np.add.at(A, (rows, cols), M.reshape(len(glob), -1).ravel())


def _same_element(nodes, s, factor, q):
    h = np.diff(nodes)
    n = len(h)
    if factor is None:
        I = 2.0 * h ** (1.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))
    else:
        wg, ww = gauss_jacobi01(q, 1.0 - 2.0 * s)
        tg, tw = gauss_legendre01(q)
        # x = a + h (eta + w), y = a + h eta, eta in [0, 1-w]
        a = nodes[:-1, None, None]
        hh = h[:, None, None]
        gap = wg[None, :, None]
        eta = (1.0 - gap) * tg[None, None, :]
        X = a + hh * (eta + gap)
        Y = a + hh * eta
        S = factor(X, Y)
        inner = np.einsum("epq,q->ep", S, tw) * (1.0 - wg)[None, :]
        I = 2.0 * h ** (1.0 - 2.0 * s) * (inner @ ww)
    M = np.empty((n, 2, 2))
    M[:, 0, 0] = M[:, 1, 1] = I
    M[:, 0, 1] = M[:, 1, 0] = -I
    glob = np.stack([np.arange(n), np.arange(1, n + 1)], axis=1)
    return glob, M


def _touching(nodes, s, factor, q):
    h = np.diff(nodes)
    h1, h2 = h[:-1], h[1:]
    m = nodes[1:-1]
    npair = len(m)
    if npair == 0:
        return np.zeros((0, 3), int), np.zeros((0, 3, 3))
    uj, uw = gauss_jacobi01(q, 2.0 - 2.0 * s)
    M = np.zeros((npair, 3, 3))
    for tri in (0, 1):
        # v-rule graded toward the end where the kernel denominator is smallest
        ratio = h1 / h2 if tri == 0 else h2 / h1
        for grp in np.unique(np.clip(np.ceil(-np.log2(np.minimum(ratio, 1.0))), 0, 40)):
            sel = np.clip(np.ceil(-np.log2(np.minimum(ratio, 1.0))), 0, 40) == grp
            first = 2.0 ** (-grp) if grp > 0 else None
            edges = geometric_edges(0.0, 1.0, first, None)
            tg, tw = gauss_legendre01(q)
            v = (edges[:-1, None] + np.diff(edges)[:, None] * tg).ravel()
            vw = (np.diff(edges)[:, None] * tw).ravel()
            a1, a2 = h1[sel][:, None], h2[sel][:, None]
            if tri == 0:
                xi0, eta0 = a1 + 0 * v, a2 * v          # (xi, eta) at u = 1
            else:
                xi0, eta0 = a1 * v, a2 + 0 * v
            D = np.stack([xi0 / a1, -xi0 / a1 + eta0 / a2, -eta0 / a2], axis=-1)
            base = (xi0 + eta0) ** (-1.0 - 2.0 * s)
            if factor is None:
                g = base * vw / (3.0 - 2.0 * s)
                M[sel] += np.einsum("pv,pva,pvb->pab", g, D, D)
            else:
                mm = m[sel][:, None, None]
                X = mm - uj[None, None, :] * xi0[:, :, None]
                Y = mm + uj[None, None, :] * eta0[:, :, None]
                S = factor(X, Y) @ uw
                g = base * vw * S
                M[sel] += np.einsum("pv,pva,pvb->pab", g, D, D)
    M *= (h1 * h2)[:, None, None]
    glob = np.stack([np.arange(npair), np.arange(1, npair + 1), np.arange(2, npair + 2)], axis=1)
    return glob, 2.0 * M


def _separated(nodes, s, kernel, q, chunk=20000):
    n = len(nodes) - 1
    h = np.diff(nodes)
    I, J = np.triu_indices(n, k=2)
    if len(I) == 0:
        return np.zeros((0, 4), int), np.zeros((0, 4, 4))
    d = nodes[J] - nodes[I + 1]
    mi = np.maximum(1, np.ceil(2.0 * h[I] / d)).astype(int)
    mj = np.maximum(1, np.ceil(2.0 * h[J] / d)).astype(int)
    nb = mi * mj
    pid = np.repeat(np.arange(len(I)), nb)
    offs = np.arange(nb.sum()) - np.repeat(np.cumsum(nb) - nb, nb)
    si, sj = offs // mj[pid], offs % mj[pid]
    xw = h[I][pid] / mi[pid]
    yw = h[J][pid] / mj[pid]
    xlo = nodes[I][pid] + si * xw
    ylo = nodes[J][pid] + sj * yw
    t, w = gauss_legendre01(q)
    Mp = np.zeros((len(I), 4, 4))
    for c0 in range(0, len(pid), chunk):
        sl = slice(c0, c0 + chunk)
        p = pid[sl]
        X = xlo[sl, None] + xw[sl, None] * t
        Y = ylo[sl, None] + yw[sl, None] * t
        WX = xw[sl, None] * w
        WY = yw[sl, None] * w
        K = kernel(X[:, :, None], Y[:, None, :])
        hi_, hj_ = h[I][p][:, None], h[J][p][:, None]
        lam = np.stack([(nodes[I + 1][p][:, None] - X) / hi_, (X - nodes[I][p][:, None]) / hi_], 1)
        mu = np.stack([(nodes[J + 1][p][:, None] - Y) / hj_, (Y - nodes[J][p][:, None]) / hj_], 1)
        kx = np.einsum("bpq,bq->bp", K, WY) * WX
        ky = np.einsum("bpq,bp->bq", K, WX) * WY
        M = np.empty((len(p), 4, 4))
        M[:, :2, :2] = np.einsum("bap,bcp,bp->bac", lam, lam, kx)
        M[:, 2:, 2:] = np.einsum("baq,bcq,bq->bac", mu, mu, ky)
        cross = -np.einsum("bap,bpq,bcq->bac", lam * WX[:, None, :], K, mu * WY[:, None, :])
        M[:, :2, 2:] = cross
        M[:, 2:, :2] = np.transpose(cross, (0, 2, 1))
        np.add.at(Mp, p, M)
    glob = np.stack([I, I + 1, J, J + 1], axis=1)
    return glob, 2.0 * Mp


def assemble_pair_form(nodes: np.ndarray, s: float, far_kernel: Kernel,
                       near_factor: Kernel | None = None, q_far: int = 8,
                       q_near: int = 20) -> np.ndarray:
    """Dense matrix of B(phi_i, phi_j) for the P1 hats on ``nodes``."""
    nodes = np.asarray(nodes, float)
    A = np.zeros((len(nodes), len(nodes)))
    for glob, M in (
        _same_element(nodes, s, near_factor, q_near),
        _touching(nodes, s, near_factor, q_near),
        _separated(nodes, s, far_kernel, q_far),
    ):
        if len(glob):
            _scatter(A, glob, M)
    return A


def load_vector(nodes: np.ndarray, fvals: np.ndarray, qx: np.ndarray, qw: np.ndarray,
                weight: np.ndarray | None = None) -> np.ndarray:
    """int f phi_j [weight] dx from values ``fvals`` at element points ``qx``.

    ``qx``/``qw`` have shape (n_elements, q) as returned by :func:`element_points`.
    """
    h = np.diff(nodes)
    lam1 = (qx - nodes[:-1, None]) / h[:, None]
    lam0 = 1.0 - lam1
    g = fvals * qw if weight is None else fvals * qw * weight
    b = np.zeros(len(nodes))
    np.add.at(b, np.arange(len(h)), np.sum(g * lam0, axis=1))
    np.add.at(b, np.arange(1, len(h) + 1), np.sum(g * lam1, axis=1))
    return b


def element_points(nodes: np.ndarray, q: int = 4) -> tuple[np.ndarray, np.ndarray]:
    t, w = gauss_legendre01(q)
    h = np.diff(nodes)
    return nodes[:-1, None] + h[:, None] * t, h[:, None] * w


def hat_integrals(nodes: np.ndarray, weight: Callable | None = None, q: int = 4) -> np.ndarray:
    qx, qw = element_points(nodes, q)
    w = None if weight is None else weight(qx)
    return load_vector(nodes, np.ones_like(qx), qx, qw, w)


def mass_matrix(nodes: np.ndarray, weight: Callable | None = None, q: int = 4) -> np.ndarray:
    qx, qw = element_points(nodes, q)
    h = np.diff(nodes)
    lam1 = (qx - nodes[:-1, None]) / h[:, None]
    lam = np.stack([1.0 - lam1, lam1], axis=1)
    g = qw if weight is None else qw * weight(qx)
    M = np.einsum("eap,ebp,ep->eab", lam, lam, g)
    glob = np.stack([np.arange(len(h)), np.arange(1, len(h) + 1)], axis=1)
    A = np.zeros((len(nodes), len(nodes)))
    _scatter(A, glob, M)
    return A
