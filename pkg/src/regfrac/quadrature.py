"""Fixed-order Gauss rules on graded panels, shared by the 1D routines."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@lru_cache(maxsize=None)
def gauss_legendre01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1]."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def gauss_jacobi01(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Rule for int_0^1 f(t) t^p dt, p > -1."""
    x, w = roots_jacobi(n, 0.0, p)
    return 0.5 * (x + 1.0), w * 0.5 ** (p + 1.0)


def geometric_edges(a: float, b: float, da: float | None, db: float | None,
                    ratio: float = 2.0) -> np.ndarray:
    """Panel edges on [a, b] whose sizes grow geometrically away from a and/or b.

    ``da``/``db`` are the first panel lengths at each end (None = no grading).
    """
    if b <= a:
        return np.array([a, b])
    mid = 0.5 * (a + b)
    left = [a]
    if da is not None:
        step = da
        while left[-1] + step < (mid if db is not None else b):
            left.append(left[-1] + step)
            step *= ratio
    right = [b]
    if db is not None:
        step = db
        while right[-1] - step > (mid if da is not None else a):
            right.append(right[-1] - step)
            step *= ratio
    return np.array(sorted(set(left) | set(right)))


def panel_rule(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    t, w = gauss_legendre01(n)
    lo = edges[:-1, None]
    width = np.diff(edges)[:, None]
    return (lo + width * t).ravel(), (width * w).ravel()
