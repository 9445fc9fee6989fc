"""Radial Dirichlet problem on the unit disk for s > 1/2.

For radial u, v the 2D form reduces to

    D(u, v) = (c_{2,s}/2) 2 pi  int int (u(r)-u(rho)) (v(r)-v(rho)) W(r, rho) r rho dr drho,

    W(r, rho) = int_0^{2 pi} (r^2 + rho^2 - 2 r rho cos phi)^(-1-s) dphi
              = 2 pi (r+rho)^(-2-2s) 2F1(1+s, 1/2; 1; z),   z = 4 r rho / (r+rho)^2.

Near the diagonal W ~ kappa(r) |r-rho|^(-1-2s); the smooth factor
W r rho |r-rho|^(1+2s) comes from the z -> 1 connection formula.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma, hyp2f1

from .galerkin import assemble_pair_form, element_points, load_vector
from .mesh import GradedMesh, graded_mesh
from .special import DomainError, check_order, normalization_constant


@dataclass(frozen=True)
class RadialKernel:
    """Angular collapse of |x-y|^(-2-2s) for radial functions in the plane."""

    s: float
    _A: float = field(init=False, repr=False)
    _B: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        s = self.s
        if abs(s - 0.5) < 1e-6:
            raise DomainError("radial kernel connection formula is singular at s = 1/2")
        # z -> 1 connection coefficients for 2F1(1+s, 1/2; 1; z), c - a - b = -s - 1/2
        object.__setattr__(self, "_A", gamma(-s - 0.5) / (gamma(-s) * math.sqrt(math.pi)))
        object.__setattr__(self, "_B", gamma(s + 0.5) / (gamma(1.0 + s) * math.sqrt(math.pi)))

    def kappa(self, r):
        """Leading coefficient of W at the diagonal: W ~ kappa(r) |r-rho|^(-1-2s)."""
        return math.sqrt(math.pi) * gamma(self.s + 0.5) / gamma(1.0 + self.s) / np.asarray(r, float)

    def _parts(self, r, rho):
        r = np.asarray(r, float)
        rho = np.asarray(rho, float)
        S = r + rho
        d = np.abs(r - rho)
        w = (d / S) ** 2  # 1 - z
        return S, d, w

    def smooth(self, r, rho) -> np.ndarray:
        """W r rho |r-rho|^(1+2s), finite and smooth across r = rho."""
        s = self.s
        S, d, w = self._parts(r, rho)
        F1 = hyp2f1(1.0 + s, 0.5, s + 1.5, w)
        F2 = hyp2f1(-s, 0.5, 0.5 - s, w)
        core = self._A * F1 * d ** (1.0 + 2.0 * s) + self._B * F2 * S ** (1.0 + 2.0 * s)
        return 2.0 * math.pi * S ** (-2.0 - 2.0 * s) * core * np.asarray(r) * np.asarray(rho)

    def W(self, r, rho) -> np.ndarray:
        s = self.s
        S, d, w = self._parts(r, rho)
        if np.any(d == 0):
            raise DomainError("radial weight is singular on the diagonal r = rho")
        z = 1.0 - w
        near = w < 0.5
        out = np.empty(np.broadcast(S, d).shape)
        zf = np.broadcast_to(z, out.shape)
        Sf = np.broadcast_to(S, out.shape)
        far = ~np.broadcast_to(near, out.shape)
        out[far] = 2.0 * math.pi * Sf[far] ** (-2.0 - 2.0 * s) * hyp2f1(1.0 + s, 0.5, 1.0, zf[far])
        if np.any(~far):
            rb = np.broadcast_to(np.asarray(r, float), out.shape)[~far]
            pb = np.broadcast_to(np.asarray(rho, float), out.shape)[~far]
            out[~far] = self.smooth(rb, pb) / (rb * pb * np.abs(rb - pb) ** (1.0 + 2.0 * s))
        return out

    def weighted(self, r, rho) -> np.ndarray:
        """W(r, rho) r rho, the kernel of the radial double integral."""
        return self.W(r, rho) * np.asarray(r) * np.asarray(rho)


def radial_weight(r: float, rho: float, s: float) -> float:
    """W(r, rho) from the closed form; r != rho."""
    s = check_order(s)
    return float(RadialKernel(s).W(r, rho))


def radial_weight_quad(r: float, rho: float, s: float, epsabs: float = 0.0, epsrel: float = 1e-12) -> float:
    """W(r, rho) by adaptive quadrature in phi (reference route).

    The peak at phi = 0 has width |r-rho| / sqrt(r rho); breakpoints at a
    geometric ladder of that scale let the adaptive rule resolve it.
    """
    if r == rho:
        raise DomainError("radial weight is singular on the diagonal r = rho")
    A = r * r + rho * rho
    B = 2.0 * r * rho

    def f(phi):
        # r^2 + rho^2 - 2 r rho cos phi written without cancellation
        return ((r - rho) ** 2 + 2.0 * B * math.sin(0.5 * phi) ** 2) ** (-1.0 - s)

    if B == 0:
        return 2.0 * math.pi * A ** (-1.0 - s)
    eps = abs(r - rho) / math.sqrt(r * rho)
    pts = [p for p in eps * 2.0 ** np.arange(0, 40) if p < math.pi]
    val, _ = quad(f, 0.0, math.pi, points=pts, limit=500, epsabs=epsabs, epsrel=epsrel)
    return 2.0 * val


@dataclass
class RadialSystem:
    mesh: GradedMesh
    s: float
    A: np.ndarray  # full matrix, r = 1 row not yet removed
    scale: float


def radial_mesh(n: int, mu: float = 3.0) -> GradedMesh:
    """Radial nodes on [0, 1] graded toward r = 1."""
    return graded_mesh(n, mu, 0.0, 1.0, ends="right")


def assemble_radial(mesh: GradedMesh, s: float, sym_tol: float = 1e-12) -> RadialSystem:
    s = check_order(s)
    if s <= 0.5:
        raise DomainError("the disk Dirichlet problem requires s > 1/2")
    ker = RadialKernel(s)
    B = assemble_pair_form(mesh.nodes, s, ker.weighted, ker.smooth)
    scale = 0.5 * normalization_constant(2, s) * 2.0 * math.pi
    A = scale * B
    amax = np.abs(A).max()
    if np.abs(A - A.T).max() > sym_tol * amax:
        raise RuntimeError("radial stiffness is not symmetric")
    if np.abs(A.sum(axis=1)).max() > 1e-10 * amax:
        raise RuntimeError("constants are not in the kernel of the radial stiffness")
    return RadialSystem(mesh, s, A, scale)


def radial_load(mesh: GradedMesh, f: Callable, q: int = 4) -> np.ndarray:
    """2 pi int f(r) phi_j(r) r dr."""
    qx, qw = element_points(mesh.nodes, q)
    return 2.0 * math.pi * load_vector(mesh.nodes, f(qx), qx, qw, qx)


def radial_energy(system: RadialSystem, u: np.ndarray) -> float:
    """D(u, u) for the radial P1 function with nodal values u."""
    return float(u @ system.A @ u)


@dataclass
class RadialSolution:
    mesh: GradedMesh
    s: float
    u: np.ndarray

    @property
    def r(self) -> np.ndarray:
        return self.mesh.nodes

    @property
    def psi(self) -> np.ndarray:
        """u / (1-r)^(2s-1); nan at r = 1."""
        d = 1.0 - self.r
        with np.errstate(divide="ignore", invalid="ignore"):
            p = self.u / d ** (2.0 * self.s - 1.0)
        p[d <= 0] = np.nan
        return p

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "u", "psi"])
        for ri, ui, pi in zip(self.r, self.u, self.psi):
            w.writerow([f"{ri:.15g}", f"{ui:.15g}", f"{pi:.15g}"])
        return buf.getvalue()


def solve_radial_dirichlet(f: Callable, mesh: GradedMesh, s: float,
                           system: RadialSystem | None = None) -> RadialSolution:
    """Dirichlet solve with u(1) = 0; the node at r = 0 is free."""
    system = system or assemble_radial(mesh, s)
    b = radial_load(mesh, f)
    u = np.zeros(len(b))
    u[:-1] = np.linalg.solve(system.A[:-1, :-1], b[:-1])
    return RadialSolution(mesh, s, u)


# ---------------------------------------------------------------------------
# boundary behaviour of psi = u / (1-r)^(2s-1)


@dataclass
class CurvatureReport:
    s: float
    n: int
    psi1: float
    dpsi1: float
    ratio: float
    dispersion: float
    ratio_spread: float
    window: tuple[float, float]
    inconclusive: bool
    basis: tuple[str, ...] = ("1", "d", "d^e", "d^2", "d^(e+1)")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _psi_fit(d: np.ndarray, psi: np.ndarray, e: float, lo: float, hi: float) -> np.ndarray:
    sel = (d > lo) & (d < hi)
    if sel.sum() < 10:
        raise ValueError(f"only {sel.sum()} nodes with 1-r in ({lo}, {hi})")
    dd = d[sel]
    X = np.stack([np.ones_like(dd), dd, dd**e, dd**2, dd ** (e + 1.0)], 1)
    scale = np.abs(X).max(axis=0)
    c, *_ = np.linalg.lstsq(X / scale, psi[sel], rcond=None)
    return c / scale


def check_curvature_identity(sol: RadialSolution, beta1: float, window: tuple[float, float] = (0.01, 0.2),
                             max_dispersion: float = 0.10) -> CurvatureReport:
    """psi(1), psi'(1) and their ratio from a least-squares fit near r = 1.

    psi is fitted against {1, d, d^e, d^2, d^(e+1)} with d = 1-r and
    e = beta1-2s+1.  The d^e term carries the first homogeneous mode and must
    be present: e is close to 1, and a linear model would absorb it into the
    slope.
    The fit is repeated on the window scaled by 1/2 and 2; ``dispersion`` is
    the relative spread of psi(1) over the three fits and ``ratio_spread`` the
    spread of the ratio.
    """
    s = sol.s
    e = beta1 - 2.0 * s + 1.0
    d = 1.0 - sol.r
    keep = d > 0
    d, psi = d[keep], sol.psi[keep]
    lo, hi = window
    fits = [_psi_fit(d, psi, e, lo * f, min(hi * f, 0.5)) for f in (0.5, 1.0, 2.0)]
    c = fits[1]
    psi1 = float(c[0])
    dpsi1 = float(-c[1])  # derivative in r, i.e. along the outward normal
    p1 = np.array([f[0] for f in fits])
    ratios = np.array([-f[1] / f[0] for f in fits])
    disp = float((p1.max() - p1.min()) / abs(p1.mean()))
    return CurvatureReport(
        s=s,
        n=sol.mesh.n,
        psi1=psi1,
        dpsi1=dpsi1,
        ratio=dpsi1 / psi1,
        dispersion=disp,
        ratio_spread=float(ratios.max() - ratios.min()),
        window=(lo, hi),
        inconclusive=disp > max_dispersion,
    )


def aitken(x0: float, x1: float, x2: float) -> float:
    """Limit of a geometrically converging sequence from three terms."""
    d1, d2 = x1 - x0, x2 - x1
    den = d2 - d1
    if den == 0 or d1 == 0 or d2 / d1 <= 0 or abs(d2 / d1) >= 1:
        raise ValueError("sequence is not converging geometrically")
    return x2 - d2 * d2 / den


def richardson(coarse: float, fine: float, order: float, ratio: float = 2.0) -> float:
    return fine + (fine - coarse) / (ratio**order - 1.0)


@dataclass
class CurvatureStudy:
    s: float
    ns: list[int]
    ratios: list[float]
    psi1: list[float]
    reports: list[CurvatureReport]
    extrapolated: float
    method: str
    order: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def curvature_study(s: float, ns=(128, 256, 512), mu: float = 3.0, beta1: float | None = None,
                    window: tuple[float, float] = (0.01, 0.2), order: float | None = None) -> CurvatureStudy:
    """Solve f = 1 on nested meshes and extrapolate psi'(1)/psi(1).

    With three or more meshes the last three ratios are combined by Aitken's
    rule and the observed order is reported; with two meshes a Richardson step
    of the given ``order`` is taken (default: the ratio is returned as is).
    """
    from .exponents import critical_exponents

    if beta1 is None:
        beta1 = critical_exponents(s, 1).beta[1]
    reps = []
    for n in ns:
        sol = solve_radial_dirichlet(lambda r: np.ones_like(r), radial_mesh(n, mu), s)
        reps.append(check_curvature_identity(sol, beta1, window))
    ratios = [r.ratio for r in reps]
    method, p = "finest", None
    ext = ratios[-1]
    if len(ratios) >= 3:
        try:
            ext = aitken(*ratios[-3:])
            d1, d2 = ratios[-2] - ratios[-3], ratios[-1] - ratios[-2]
            p = float(math.log2(abs(d1 / d2)))
            method = "aitken"
        except ValueError:
            pass
    elif len(ratios) == 2 and order is not None:
        ext = richardson(ratios[0], ratios[1], order)
        method, p = "richardson", order
    return CurvatureStudy(float(s), list(ns), ratios, [r.psi1 for r in reps], reps, float(ext), method, p)


def log_balance_ratio(s: float) -> float:
    """psi'(1)/psi(1) forced by cancelling the log d terms of the operator at the circle.

    The curvature correction of d^(2s-1) contributes (2s-1)/2 B(s-1/2, 3/2) log(1/d),
    the flat d^(2s) term sqrt(pi) Gamma(s+1/2)/Gamma(1+s) log d (both without c_{2,s}).
    """
    s = check_order(s)
    if s <= 0.5:
        raise DomainError("needs s > 1/2")
    from scipy.special import beta as beta_fn

    curv = 0.5 * (2.0 * s - 1.0) * beta_fn(s - 0.5, 1.5)
    flat = math.sqrt(math.pi) * gamma(s + 0.5) / gamma(1.0 + s)
    return -curv / flat


def eval_radial_operator(u: Callable[[float], float], r: float, s: float, cutoff: float = 1e-4) -> float:
    """c_{2,s} p.v. int_disk (u(x) - u(y)) |x-y|^(-2-2s) dy for radial u at |x| = r < 1.

    The rho-integral near rho = r is symmetrized; below ``cutoff`` times the
    half-distance to the boundary the symmetrized integrand is replaced by its
    leading power t^(1-2s).
    """
    s = check_order(s)
    ker = RadialKernel(s)
    a = 0.5 * (1.0 - r)
    ur = u(r)

    def mid(t):
        return ((ur - u(r + t)) * ker.smooth(r, r + t) + (ur - u(r - t)) * ker.smooth(r, r - t)) / r * t ** (-1.0 - 2.0 * s)

    t0 = cutoff * a
    opts = dict(limit=400, epsabs=0.0, epsrel=1e-11)
    brk = [t0 * 10.0**k for k in range(1, 5) if t0 * 10.0**k < a]
    val = quad(mid, t0, a, points=brk, **opts)[0] + mid(t0) * t0 / (2.0 - 2.0 * s)
    far = lambda p: (ur - u(p)) * float(ker.W(r, p)) * p
    val += quad(far, 0.0, r - a, **opts)[0]
    val += quad(far, r + a, 1.0, **opts)[0]
    return normalization_constant(2, s) * val
