"""Command-line front end.

Every run prints (or writes) a JSON document holding the resolved config, the
library version and the result.  Floats are written with 15 significant
digits so identical configs give byte-identical output.

Exit codes: 0 success, 1 invalid input or failed validation, 2 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .angular import EigenError, angular_spectrum
from .disk import check_curvature_identity, curvature_study, radial_mesh, solve_radial_dirichlet
from .exponents import BracketError, critical_exponents, exponent_atlas_csv
from .operator1d import QuadratureError, eval_power_halfline, eval_pv, power_function
from .solver1d import (
    FitError,
    SolverError,
    default_mesh,
    estimate_boundary_holder,
    fit_boundary_expansion,
    named_load,
    solve_dirichlet,
    solve_neumann,
    with_error_estimate,
)
from .special import DomainError, full_power_coeff, regional_power_coeff

OUTPUT_DIR_ENV = "REGFRAC_OUTPUT_DIR"

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    """A computed check did not meet its tolerance."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; bad flags are input errors here
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    s: float | None = None
    n: int | None = None
    mu: float | None = None
    tol: float | None = None
    output: str | None = None
    format: str = "json"
    extra: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.s is not None and not (0.0 < self.s < 1.0):
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if self.n is not None and self.n < 2:
            raise DomainError(f"n must be at least 2, got {self.n}")
        if self.mu is not None and self.mu < 1:
            raise DomainError(f"grading exponent must be >= 1, got {self.mu}")
        if self.tol is not None and self.tol <= 0:
            raise DomainError("tolerance must be positive")
        if self.format not in ("json", "csv"):
            raise DomainError(f"unknown format {self.format!r}")


def _round(obj):
    """Recursively round floats to 15 significant digits; nan/inf become null."""
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.15g}") if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(cfg: RunConfig, result: Any) -> str:
    doc = {"version": __version__, "config": asdict(cfg), "result": result}
    return json.dumps(_round(doc), indent=2, sort_keys=True) + "\n"


def _csv_with_header(cfg: RunConfig, body: str) -> str:
    head = "# " + json.dumps(_round({"version": __version__, "config": asdict(cfg)}), sort_keys=True)
    return head + "\n" + body


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
        return
    path = Path(cfg.output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _sweep(spec: str) -> list[float]:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise UsageError(f"--sweep expects lo:hi:step, got {spec!r}") from exc
    if step <= 0 or hi < lo:
        raise UsageError("--sweep needs step > 0 and hi >= lo")
    m = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + i * step, 12) for i in range(m + 1)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_exponents(a, cfg: RunConfig) -> str:
    svals = _sweep(a.sweep) if a.sweep else [a.s]
    if a.s is None and not a.sweep:
        raise UsageError("exponents needs --s or --sweep")
    for s in svals:
        RunConfig("exponents", s=s).validate()
    if cfg.format == "csv":
        return _csv_with_header(cfg, exponent_atlas_csv(svals, a.k, cfg.tol))
    tables = [critical_exponents(s, a.k, cfg.tol) for s in svals]
    res = [t.to_dict() for t in tables]
    return dumps(cfg, res if a.sweep else res[0])


def cmd_coeff(a, cfg: RunConfig) -> str:
    return dumps(cfg, {
        "beta": a.beta,
        "s": a.s,
        "C_reg": regional_power_coeff(a.beta, a.s),
        "C_full": full_power_coeff(a.beta, a.s),
    })


def cmd_eigen(a, cfg: RunConfig) -> str:
    if a.n % 2:
        raise DomainError("eigen needs an even --n")
    sp = angular_spectrum(a.s, a.n, a.modes, cfg.mu)
    if cfg.format == "csv":
        return _csv_with_header(cfg, sp.to_csv())
    return dumps(cfg, sp.to_dict())


def cmd_verify_power(a, cfg: RunConfig) -> str:
    if a.x <= 0:
        raise DomainError("--x must be positive")
    num, qerr = eval_pv(power_function(a.beta), a.x, a.s, return_error=True)
    ref = float(eval_power_halfline(a.beta, a.x, a.s))
    rel = abs(num - ref) / max(abs(ref), 1e-300)
    out = dumps(cfg, {"pv": num, "closed_form": ref, "relative_error": rel, "quadrature_error": qerr,
                      "tol": cfg.tol, "passed": rel < cfg.tol})
    if rel >= cfg.tol:
        raise ValidationFailure(out)
    return out


def cmd_solve1d(a, cfg: RunConfig) -> str:
    if a.n % 2:
        raise DomainError("solve1d needs an even --n")
    mesh = default_mesh(a.n, a.bc, cfg.mu)
    cfg.mu = mesh.mu
    f = named_load(a.f)
    solver = solve_neumann if a.bc == "neumann" else solve_dirichlet
    if a.bc == "dirichlet" and a.s <= 0.5:
        raise DomainError("Dirichlet requires s > 1/2: there is no trace for s <= 1/2")
    sol = solver(f, mesh, a.s, f_name=a.f)
    if cfg.format == "csv":
        return _csv_with_header(cfg, sol.to_csv())
    table = critical_exponents(a.s, 1)
    sol = with_error_estimate(sol, solver, f)
    res: dict[str, Any] = {
        "bc": a.bc,
        "n": a.n,
        "mu": mesh.mu,
        "mean_correction": sol.mean_correction,
        "error_estimate": sol.error_estimate,
        "u_min": float(sol.u.min()),
        "u_max": float(sol.u.max()),
    }
    try:
        fit = fit_boundary_expansion(sol.x, sol.u, a.s, table, a.window)
        res["fit"] = fit.to_dict()
        hfit = fit_boundary_expansion(sol.x, sol.u, a.s, table, a.window or 0.02)
        res["holder"] = estimate_boundary_holder(sol.x, sol.u, hfit, sol.error_profile).to_dict()
    except FitError as exc:
        res["fit_error"] = str(exc)
    return dumps(cfg, res)


def _read_solution_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("".join(lines)))
    header = next(reader)
    cols = [c.strip() for c in header]
    if "x" not in cols or "u" not in cols:
        raise DomainError(f"{path}: expected columns x and u, got {cols}")
    ix, iu = cols.index("x"), cols.index("u")
    for row in reader:
        if row:
            rows.append((float(row[ix]), float(row[iu])))
    data = np.array(rows)
    return data[:, 0], data[:, 1]


def cmd_fit(a, cfg: RunConfig) -> str:
    x, u = _read_solution_csv(a.input)
    fit = fit_boundary_expansion(x, u, a.s, critical_exponents(a.s, 1), a.window)
    return dumps(cfg, fit.to_dict())


def cmd_disk(a, cfg: RunConfig) -> str:
    mu = cfg.mu
    if a.s <= 0.5:
        raise DomainError("the disk Dirichlet problem requires s > 1/2")
    beta1 = critical_exponents(a.s, 1).beta[1]
    window = (a.window_lo, a.window_hi)
    if a.study:
        if a.n % 4:
            raise DomainError("--study needs --n divisible by 4")
        st = curvature_study(a.s, (a.n // 4, a.n // 2, a.n), mu, beta1, window)
        return dumps(cfg, st.to_dict())
    sol = solve_radial_dirichlet(lambda r: np.ones_like(r), radial_mesh(a.n, mu), a.s)
    if cfg.format == "csv":
        return _csv_with_header(cfg, sol.to_csv())
    rep = check_curvature_identity(sol, beta1, window)
    return dumps(cfg, rep.to_dict())


def cmd_selftest(a, cfg: RunConfig) -> str:
    from .acceptance import run_all

    results = run_all(quick=not a.full)
    for r in results:
        print(r.line(), file=sys.stderr)
    # timings stay on stderr so the document is reproducible
    out = dumps(cfg, [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results])
    if not all(r.passed for r in results):
        raise ValidationFailure(out)
    return out


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="regfrac", description="Regional fractional Laplacian numerics.")
    p.add_argument("--version", action="version", version=f"regfrac {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp, fmt=False):
        sp.add_argument("--output", "-o", default=None, help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV})")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("exponents", help="critical exponents beta_k(s)")
    sp.add_argument("--s", type=float)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--sweep", help="lo:hi:step grid of s values")
    sp.add_argument("--tol", type=float, default=1e-12)
    common(sp, fmt=True)

    sp = sub.add_parser("coeff", help="power coefficients C_reg and C_full")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--s", type=float, required=True)
    common(sp)

    sp = sub.add_parser("eigen", help="angular eigenvalues and exponents")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--modes", type=int, default=3)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--mu", type=float, default=2.0)
    common(sp, fmt=True)

    sp = sub.add_parser("verify-power", help="p.v. quadrature vs closed form for x^beta on the half-line")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-6)
    common(sp)

    sp = sub.add_parser("solve1d", help="Neumann/Dirichlet Galerkin solve on (0,1)")
    sp.add_argument("--bc", choices=("neumann", "dirichlet"), required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--f", default="cospix", help="const1, cospix or custom:FILE.csv")
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--window", type=float, default=None, help="fit window (default: first 16 nodes)")
    common(sp, fmt=True)

    sp = sub.add_parser("fit", help="boundary expansion fit of a solution CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--window", type=float, default=None)
    common(sp)

    sp = sub.add_parser("disk", help="radial Dirichlet solve on the unit disk, f = 1")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--mu", type=float, default=3.0)
    sp.add_argument("--window-lo", type=float, default=0.01)
    sp.add_argument("--window-hi", type=float, default=0.2)
    sp.add_argument("--study", action="store_true", help="solve at n/4, n/2, n and extrapolate")
    common(sp, fmt=True)

    sp = sub.add_parser("selftest", help="run the acceptance checks")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true", help="analytic identities only (default)")
    g.add_argument("--full", action="store_true", help="include refinement studies (minutes)")
    common(sp)
    return p


HANDLERS = {
    "exponents": cmd_exponents,
    "coeff": cmd_coeff,
    "eigen": cmd_eigen,
    "verify-power": cmd_verify_power,
    "solve1d": cmd_solve1d,
    "fit": cmd_fit,
    "disk": cmd_disk,
    "selftest": cmd_selftest,
}


def _config(a) -> RunConfig:
    known = {"cmd", "s", "n", "mu", "tol", "output", "format"}
    extra = {k: v for k, v in vars(a).items() if k not in known}
    return RunConfig(
        subcommand=a.cmd,
        s=getattr(a, "s", None),
        n=getattr(a, "n", None),
        mu=getattr(a, "mu", None),
        tol=getattr(a, "tol", None),
        output=a.output,
        format=getattr(a, "format", "json"),
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    try:
        a = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    cfg = _config(a)
    try:
        cfg.validate()
        text = HANDLERS[a.cmd](a, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationFailure as exc:
        _emit(cfg, str(exc))
        print("error: validation failed", file=sys.stderr)
        return EXIT_INVALID
    except (BracketError, QuadratureError, SolverError, EigenError, FitError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(cfg, text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
