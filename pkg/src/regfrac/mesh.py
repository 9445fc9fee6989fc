"""Graded 1D meshes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GradedMesh:
    """Nodes on [a, b] graded polynomially (exponent ``mu``) toward the chosen ends.

    With ``ends="both"`` node j (j <= n/2) sits at a + (b-a)/2 (2j/n)^mu, so the
    mesh for n/2 is the even-indexed subset of the mesh for n.
    """

    nodes: np.ndarray
    mu: float
    ends: str

    @property
    def n(self) -> int:
        return len(self.nodes) - 1

    @property
    def h(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    def coarsen(self) -> "GradedMesh":
        if self.n % 2:
            raise ValueError("only meshes with an even number of cells can be coarsened")
        return GradedMesh(self.nodes[::2].copy(), self.mu, self.ends)


def graded_mesh(n: int, mu: float = 2.0, a: float = 0.0, b: float = 1.0,
                ends: str = "both") -> GradedMesh:
    if n < 1:
        raise ValueError("need at least one cell")
    if mu < 1:
        raise ValueError("grading exponent must be >= 1")
    j = np.arange(n + 1)
    L = b - a
    if ends == "both":
        if n % 2:
            raise ValueError("two-sided grading needs an even number of cells")
        t = 2.0 * j / n
        x = np.where(j <= n // 2, 0.5 * t**mu, 1.0 - 0.5 * (2.0 - t) ** mu)
    elif ends == "left":
        x = (j / n) ** mu
    elif ends == "right":
        x = 1.0 - (1.0 - j / n) ** mu
    elif ends == "none":
        x = j / n
    else:
        raise ValueError(f"unknown grading ends={ends!r}")
    nodes = a + L * x
    nodes[0], nodes[-1] = a, b
    if np.any(np.diff(nodes) <= 0):
        raise ValueError("mesh nodes are not strictly increasing")
    return GradedMesh(nodes, float(mu), ends)


def uniform_mesh(n: int, a: float = 0.0, b: float = 1.0) -> GradedMesh:
    return graded_mesh(n, 1.0, a, b, ends="none")
