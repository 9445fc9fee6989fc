"""Minimization of the H^s(0,1) energy with a load f over P1 spaces.

Neumann: free minimization, mean-zero representative through a bordered
(Lagrange multiplier) system.  Dirichlet (s > 1/2): endpoint values pinned to 0.
The discrete problem solved is  D(u, phi) = int f phi  for all admissible phi.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .exponents import ExponentTable
from .galerkin import assemble_pair_form, element_points, hat_integrals, load_vector, mass_matrix
from .mesh import GradedMesh, graded_mesh
from .special import DomainError, check_order, normalization_constant

log = logging.getLogger(__name__)

F = Callable[[np.ndarray], np.ndarray]


class SolverError(RuntimeError):
    pass


class FitError(RuntimeError):
    pass


@dataclass
class GalerkinSystem:
    mesh: GradedMesh
    s: float
    A: np.ndarray
    mass_vector: np.ndarray
    mode: str = "neumann"

    @property
    def mass(self) -> np.ndarray:
        """Consistent P1 mass matrix."""
        return mass_matrix(self.mesh.nodes)

    def energy(self, u: np.ndarray, b: np.ndarray) -> float:
        """Discrete quadratic energy 1/2 u.A.u - b.u minimized by the solve."""
        return 0.5 * float(u @ self.A @ u) - float(b @ u)


def assemble(mesh: GradedMesh, s: float, sym_tol: float = 1e-12) -> GalerkinSystem:
    """Stiffness of D(u,v) = c_{1,s}/2 int int (u(x)-u(y))(v(x)-v(y)) |x-y|^(-1-2s)."""
    s = check_order(s)
    c = normalization_constant(1, s)
    B = assemble_pair_form(mesh.nodes, s, lambda x, y: np.abs(x - y) ** (-1.0 - 2.0 * s))
    A = 0.5 * c * B
    amax = np.abs(A).max()
    if np.abs(A - A.T).max() > sym_tol * amax:
        raise SolverError("assembled stiffness is not symmetric")
    if np.abs(A.sum(axis=1)).max() > 1e-10 * amax:
        raise SolverError("constants are not in the kernel of the assembled stiffness")
    return GalerkinSystem(mesh, s, A, hat_integrals(mesh.nodes))


@dataclass
class Solution:
    mesh: GradedMesh
    s: float
    u: np.ndarray
    bc: str
    f_name: str = ""
    load: np.ndarray | None = None
    mean_correction: float = 0.0
    error_estimate: float | None = None
    error_profile: np.ndarray | None = None

    @property
    def x(self) -> np.ndarray:
        return self.mesh.nodes

    def boundary_quotient(self) -> np.ndarray:
        """u / delta^(2s-1) with delta = min(x, 1-x); nan at the endpoints."""
        x = self.x
        d = np.minimum(x - x[0], x[-1] - x)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = self.u / d ** (2.0 * self.s - 1.0)
        q[d == 0] = np.nan
        return q

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "u", "u_over_delta"])
        for xi, ui, qi in zip(self.x, self.u, self.boundary_quotient()):
            w.writerow([f"{xi:.15g}", f"{ui:.15g}", f"{qi:.15g}"])
        return buf.getvalue()


def _load(mesh: GradedMesh, f: F | np.ndarray, q: int = 4) -> np.ndarray:
    qx, qw = element_points(mesh.nodes, q)
    fv = f(qx) if callable(f) else np.asarray(f, float).reshape(qx.shape)
    return load_vector(mesh.nodes, fv, qx, qw)


def solve_neumann(f: F | np.ndarray, mesh: GradedMesh, s: float, system: GalerkinSystem | None = None,
                  f_name: str = "", q: int = 4, mean_tol: float = 1e-10) -> Solution:
    """Mean-zero minimizer of [u]^2 - int f u over the hat space.

    ``f`` is a callable or its values at the q-point Gauss nodes of each cell.
    A load with nonzero mean is projected to mean zero; the removed mean is
    stored in ``mean_correction``.
    """
    system = system or assemble(mesh, s)
    b = _load(mesh, f, q)
    m = system.mass_vector
    length = m.sum()
    mean_f = b.sum() / length
    if abs(mean_f) > mean_tol:
        b = b - mean_f * m
        if abs(mean_f) > 1e-8:
            warnings.warn(f"load has mean {mean_f:.3e}; projected to mean zero", stacklevel=2)
    n = len(m)
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = system.A
    K[:n, n] = K[n, :n] = m
    rhs = np.append(b, 0.0)
    try:
        sol = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"bordered Neumann system is singular: {exc}") from exc
    return Solution(mesh, s, sol[:n], "neumann", f_name, b, mean_f)


def solve_dirichlet(f: F | np.ndarray, mesh: GradedMesh, s: float,
                    system: GalerkinSystem | None = None, f_name: str = "", q: int = 4) -> Solution:
    s = check_order(s)
    if s <= 0.5:
        raise DomainError(
            "Dirichlet requires s > 1/2: for s <= 1/2 there is no trace and H^s_0 = H^s"
        )
    system = system or assemble(mesh, s)
    b = _load(mesh, f, q)
    A = system.A[1:-1, 1:-1]
    u = np.zeros(len(b))
    try:
        u[1:-1] = np.linalg.solve(A, b[1:-1])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"reduced Dirichlet system is singular: {exc}") from exc
    return Solution(mesh, s, u, "dirichlet", f_name, b)


def with_error_estimate(sol: Solution, solver, f, window: float = 0.2) -> Solution:
    """Attach a two-mesh discretization error estimate near x = 0.

    The coarse solve uses the even-indexed nodes.  The nodal difference is
    taken relative to its value at x = 0, since a constant offset is absorbed
    by the fitted c0 term; ``error_profile`` holds it at every fine node
    (interpolated at the odd ones) and ``error_estimate`` its max on (0, window].
    """
    coarse = solver(f, sol.mesh.coarsen(), sol.s)
    diff = sol.u[::2] - coarse.u
    xs = sol.x[::2]
    prof = np.abs(np.interp(sol.x, xs, diff - diff[0]))
    sol.error_profile = prof
    sel = (sol.x > 0) & (sol.x <= window)
    sol.error_estimate = float(prof[sel].max()) if sel.any() else float("nan")
    return sol


# ---------------------------------------------------------------------------
# boundary expansion


@dataclass
class BoundaryExpansion:
    c0: float
    a0: float
    a1: float
    beta1: float
    window: tuple[float, float]
    residual: float
    cond: float
    n_points: int
    basis: tuple[str, ...] = ("1", "x^(2s-1)", "x^beta1")
    s: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def second_term(self, x: np.ndarray) -> np.ndarray:
        if self.basis[1] == "log(x)":
            return np.log(x)
        return np.power(x, 2.0 * self.s - 1.0)

    def singular_part(self, x) -> np.ndarray:
        """c0 + a0 * (x^(2s-1) or log x)."""
        x = np.asarray(x, float)
        return self.c0 + self.a0 * self.second_term(x)


DEGENERATE_TOL = 1e-3
MAX_COND = 1e13


def _basis(x: np.ndarray, s: float, beta1: float) -> tuple[np.ndarray, tuple[str, ...]]:
    if abs(2.0 * s - 1.0) < DEGENERATE_TOL:
        # 1 and x^(2s-1) coincide; the second kernel element becomes log x
        return np.stack([np.ones_like(x), np.log(x), x**beta1], 1), ("1", "log(x)", "x^beta1")
    return np.stack([np.ones_like(x), x ** (2.0 * s - 1.0), x**beta1], 1), ("1", "x^(2s-1)", "x^beta1")


AUTO_WINDOW_NODES = 16


def auto_window(x: np.ndarray, k: int = AUTO_WINDOW_NODES) -> float:
    """Window holding the first k interior nodes, capped at 0.2.

    A window that shrinks with the mesh keeps the truncated terms of the
    expansion from biasing a0 by a mesh-independent amount.
    """
    x = np.asarray(x, float)
    xi = x[x > 0]
    return float(min(0.2, xi[min(k, len(xi) - 1)]))


def fit_boundary_expansion(x: np.ndarray, u: np.ndarray, s: float, table: ExponentTable | float,
                           window: float | None = None, min_points: int = 8) -> BoundaryExpansion:
    """Least-squares fit of u on (0, window) against {1, x^(2s-1), x^beta1}.

    ``window=None`` picks :func:`auto_window`.  For |2s-1| < 1e-3 the middle
    basis function is replaced by log x (see ``basis`` on the result).
    """
    if window is None:
        window = auto_window(x)
    if not 0 < window <= 0.2:
        raise FitError("fit window must lie in (0, 0.2]")
    beta1 = table.beta[1] if isinstance(table, ExponentTable) else float(table)
    x = np.asarray(x, float)
    u = np.asarray(u, float)
    sel = (x > 0) & (x < window)
    if sel.sum() < min_points:
        raise FitError(f"only {sel.sum()} nodes in (0, {window}); need {min_points}")
    X, names = _basis(x[sel], s, beta1)
    scale = np.abs(X).max(axis=0)
    Xs = X / scale
    cond = float(np.linalg.cond(Xs))
    if not math.isfinite(cond) or cond > MAX_COND:
        raise FitError(f"fit design matrix ill-conditioned (cond={cond:.3e})")
    coef, *_ = np.linalg.lstsq(Xs, u[sel], rcond=None)
    coef = coef / scale
    res = u[sel] - X @ coef
    return BoundaryExpansion(
        c0=float(coef[0]),
        a0=float(coef[1]),
        a1=float(coef[2]),
        beta1=beta1,
        window=(0.0, window),
        residual=float(np.sqrt(np.mean(res**2))),
        cond=cond,
        n_points=int(sel.sum()),
        basis=names,
        s=s,
    )


def fit_solution(sol: Solution, table: ExponentTable | float, window: float | None = None) -> BoundaryExpansion:
    """Fit at the left end; the right end is handled by mirroring x -> 1-x."""
    return fit_boundary_expansion(sol.x, sol.u, sol.s, table, window)


@dataclass
class HolderEstimate:
    slope: float
    slopes: list[float]
    spread: float
    windows: list[tuple[float, float]]
    inconclusive: bool
    exceeds_beta1: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_boundary_holder(x: np.ndarray, u: np.ndarray, fit: BoundaryExpansion,
                             error_estimate: float | np.ndarray | None = None, levels: int = 5,
                             margin: float = 0.05, max_spread: float = 0.3) -> HolderEstimate:
    """Log-log growth exponent of u - c0 - a0 x^(2s-1) over dyadic windows.

    Windows are (2^-(j+1) w, 2^-j w), j = 0..levels-1.  The estimate is
    inconclusive when the remainder in some window is below ten times the
    discretization error estimate, changes sign, or has fewer than 2 nodes,
    and when the per-window slopes spread by more than ``max_spread`` (the
    remainder is then not a single power on the window).
    ``error_estimate`` is a scalar bound or a nodal profile aligned with x.
    """
    x = np.asarray(x, float)
    u = np.asarray(u, float)
    w = fit.window[1]
    rem = u - fit.singular_part(np.where(x > 0, x, 1.0))
    slopes, wins = [], []
    reasons = []
    for j in range(levels):
        lo, hi = w * 2.0 ** (-j - 1), w * 2.0 ** (-j)
        sel = (x > lo) & (x <= hi)
        wins.append((lo, hi))
        if sel.sum() < 2:
            reasons.append(f"window {j} has {sel.sum()} nodes")
            slopes.append(float("nan"))
            continue
        r = rem[sel]
        if np.any(np.sign(r) != np.sign(r[0])) or np.any(r == 0):
            reasons.append(f"remainder changes sign in window {j}")
        if error_estimate is not None:
            e = np.broadcast_to(np.asarray(error_estimate, float), x.shape)[sel]
            bad = bool(np.min(np.abs(r)) < 10.0 * np.max(e))
        else:
            bad = False
        if bad:
            reasons.append(f"remainder below 10x error estimate in window {j}")
        with np.errstate(divide="ignore"):
            p = np.polyfit(np.log(x[sel]), np.log(np.abs(r)), 1)
        slopes.append(float(p[0]))
    good = [v for v in slopes if math.isfinite(v)]
    slope = float(np.mean(good)) if good else float("nan")
    spread = float(np.max(good) - np.min(good)) if good else float("nan")
    if math.isfinite(spread) and spread > max_spread:
        reasons.append(f"per-window slopes spread {spread:.3f} > {max_spread}")
    return HolderEstimate(
        slope=slope,
        slopes=slopes,
        spread=spread,
        windows=wins,
        inconclusive=bool(reasons),
        exceeds_beta1=bool(math.isfinite(slope) and slope > fit.beta1 + margin),
        reason="; ".join(reasons),
    )


# ---------------------------------------------------------------------------
# named loads


def named_load(name: str, s: float | None = None) -> F:
    """Built-in right-hand sides: ``const1``, ``cospix``, ``custom:file.csv``.

    CSV files hold two columns (x, f) and are interpolated linearly.
    """
    if name == "const1":
        return lambda x: np.ones_like(np.asarray(x, float))
    if name == "cospix":
        return lambda x: np.cos(np.pi * np.asarray(x, float))
    if name.startswith("custom:"):
        data = np.loadtxt(name.split(":", 1)[1], delimiter=",", ndmin=2, comments="#")
        if data.shape[1] < 2:
            raise ValueError("custom load CSV needs two columns (x, f)")
        xs, fs = data[:, 0], data[:, 1]
        return lambda x: np.interp(np.asarray(x, float), xs, fs)
    raise ValueError(f"unknown load {name!r}")


def default_mesh(n: int, bc: str, mu: float | None = None) -> GradedMesh:
    if mu is None:
        mu = 3.0 if bc == "dirichlet" else 2.0
    return graded_mesh(n, mu)
