"""Critical homogeneity exponents beta_k(s) and the Hölder threshold alpha_s.

The k-th exponent (k >= 1) is the unique root of h1 - h2 on
(2s-1+k, s+k): h2 has a +inf pole at the left end and vanishes at the right
end while h1 stays positive, so the bracket always carries a sign change.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .special import DomainError, check_order, h1, h2, regional_power_coeff


class BracketError(RuntimeError):
    """No sign change of h1 - h2 on the expected bracket."""


@dataclass
class ExponentTable:
    s: float
    beta: list[float]
    alpha_s: float
    residuals: list[float]
    brackets: list[tuple[float, float]]
    creg_residuals: list[float] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def beta0(self) -> float:
        return self.beta[0]

    @property
    def beta1(self) -> float:
        return self.beta[1]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["brackets"] = [list(b) for b in self.brackets]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "ExponentTable":
        d = dict(d)
        d["brackets"] = [tuple(b) for b in d["brackets"]]
        return cls(**d)

    def check_invariants(self) -> list[str]:
        """Return a list of violated structural properties (empty when all hold)."""
        s = self.s
        bad = []
        b = self.beta
        b0 = max(2 * s - 1, 0.0)
        if b[0] != b0:
            bad.append(f"beta0={b[0]} != max(2s-1,0)={b0}")
        for k in range(1, len(b)):
            if not (k + b0 < b[k] < k + s):
                bad.append(f"beta{k}={b[k]} outside ({k + b0}, {k + s})")
            if b[k] <= b[k - 1]:
                bad.append(f"beta not increasing at k={k}")
            if k >= 2 and not b[k] > 1 + b[k - 1]:
                bad.append(f"beta{k} <= 1 + beta{k - 1}")
        a = self.alpha_s
        if not (0 < a < 1 - s):
            bad.append(f"alpha_s={a} outside (0, 1-s)")
        if not 2 * s + a > 1:
            bad.append(f"2s+alpha_s={2 * s + a} <= 1")
        return bad


def g(beta: float, s: float) -> float:
    return h1(beta, s) - h2(beta, s)


def _bisect(f, lo: float, hi: float, flo: float, tol: float) -> float:
    # keep halving past |dbeta| < tol until the residual is below tol as well,
    # bounded by the float resolution of the bracket
    mid = 0.5 * (lo + hi)
    fm = f(mid)
    while hi - lo > tol or (abs(fm) > tol and hi - lo > 8 * np.spacing(hi)):
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        fm = f(mid)
    return mid


def _count_sign_changes(f, lo: float, hi: float, n: int = 64) -> int:
    xs = np.linspace(lo, hi, n)
    vals = np.array([f(x) for x in xs])
    return int(np.sum(np.sign(vals[1:]) != np.sign(vals[:-1])))


def critical_exponents(s: float, K: int = 3, tol: float = 1e-12) -> ExponentTable:
    s = check_order(s)
    if K < 1:
        raise DomainError("need K >= 1")
    if tol <= 0:
        raise DomainError("need tol > 0")
    f = lambda b: g(b, s)  # noqa: E731
    beta0 = max(2.0 * s - 1.0, 0.0)
    betas = [beta0]
    residuals = [0.0]
    creg = [abs(regional_power_coeff(beta0, s))]
    brackets = [(beta0, beta0)]
    diags: list[str] = []
    for k in range(1, K + 1):
        eps = 1e-6 * max(1, k)
        lo, hi = 2.0 * s - 1.0 + k + eps, s + k - eps
        flo, fhi = f(lo), f(hi)
        if (flo > 0) == (fhi > 0):
            samples = {round(x, 6): f(x) for x in np.linspace(lo, hi, 9)}
            raise BracketError(
                f"k={k}, s={s}: g has no sign change on [{lo}, {hi}]; samples {samples}"
            )
        if _count_sign_changes(f, lo, hi) > 1:
            diags.append(f"k={k}: more than one sign change sampled in bracket")
        root = _bisect(f, lo, hi, flo, tol)
        betas.append(root)
        residuals.append(abs(f(root)))
        creg.append(abs(regional_power_coeff(root, s)))
        brackets.append((lo, hi))
    return ExponentTable(
        s=s,
        beta=betas,
        alpha_s=betas[1] - 2.0 * s,
        residuals=residuals,
        brackets=brackets,
        creg_residuals=creg,
        diagnostics=diags,
    )


def alpha_critical(s: float, tol: float = 1e-12) -> float:
    return critical_exponents(s, 1, tol).alpha_s


@dataclass
class RootReport:
    beta: float
    s: float
    h_residual: float
    creg_residual: float
    beta_from_eigen: float | None = None

    def ok(self, tol: float) -> bool:
        return self.h_residual < tol and self.creg_residual < tol


def verify_root(beta: float, s: float, tol: float = 1e-8, eigen_beta: float | None = None) -> RootReport:
    """Residuals of a candidate exponent in the h1/h2 and C_reg formulations.

    The h1/h2 residual is nan at beta0 when beta0 = 2s-1 (h1 pole there).
    """
    s = check_order(s)
    try:
        hres = abs(g(beta, s))
    except DomainError:
        hres = math.nan
    return RootReport(
        beta=beta,
        s=s,
        h_residual=hres,
        creg_residual=abs(regional_power_coeff(beta, s)),
        beta_from_eigen=eigen_beta,
    )


def exponent_atlas_csv(s_values, K: int = 3, tol: float = 1e-12) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "alpha_s"] + [f"beta{k}" for k in range(K + 1)])
    for s in s_values:
        t = critical_exponents(s, K, tol)
        w.writerow([f"{s:.15g}", f"{t.alpha_s:.15g}"] + [f"{b:.15g}" for b in t.beta])
    return buf.getvalue()
