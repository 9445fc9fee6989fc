"""Numerics for the regional fractional Laplacian on intervals and the disk.

Exponent tables, pointwise operator evaluation, P1 Galerkin solvers with
boundary-expansion fits, the angular eigenproblem and a radial disk solver.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .special import (
    DomainError,
    FracOrder,
    PoleError,
    extension_constant,
    full_power_coeff,
    hardy_coefficient,
    kappa_s,
    normalization_constant,
    regional_power_coeff,
)
from .exponents import BracketError, ExponentTable, alpha_critical, critical_exponents, verify_root
from .angular import angular_spectrum, assemble_angular, beta_from_lambda, eigen_solve
from .operator1d import eval_boundary_formula, eval_power_halfline, eval_pv
from .mesh import GradedMesh, graded_mesh, uniform_mesh
from .solver1d import (
    assemble,
    estimate_boundary_holder,
    fit_boundary_expansion,
    solve_dirichlet,
    solve_neumann,
)
from .disk import assemble_radial, check_curvature_identity, radial_weight, solve_radial_dirichlet

__all__ = [
    "BracketError",
    "DomainError",
    "ExponentTable",
    "FracOrder",
    "GradedMesh",
    "PoleError",
    "alpha_critical",
    "angular_spectrum",
    "assemble",
    "assemble_angular",
    "assemble_radial",
    "beta_from_lambda",
    "check_curvature_identity",
    "critical_exponents",
    "eigen_solve",
    "estimate_boundary_holder",
    "eval_boundary_formula",
    "eval_power_halfline",
    "eval_pv",
    "extension_constant",
    "fit_boundary_expansion",
    "full_power_coeff",
    "graded_mesh",
    "hardy_coefficient",
    "kappa_s",
    "normalization_constant",
    "radial_weight",
    "regional_power_coeff",
    "solve_dirichlet",
    "solve_neumann",
    "solve_radial_dirichlet",
    "uniform_mesh",
    "verify_root",
]
