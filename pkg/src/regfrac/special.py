"""Gamma-family kernels and the normalization constants of the regional operator.

All Gamma products are evaluated through ``gammaln`` with the sign tracked by
``gammasgn``, so nothing overflows for orders close to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import gammaln, gammasgn

POLE_GUARD = 1e-8
S_MAX = 1.0 - 1e-6


class DomainError(ValueError):
    """Argument outside the domain of a kernel function."""


class PoleError(DomainError):
    """Argument within the pole guard of a genuine singularity."""


def check_order(s: float) -> float:
    s = float(s)
    if not (0.0 < s < 1.0) or not math.isfinite(s):
        raise DomainError(f"fractional order must lie in (0, 1), got s={s!r}")
    if s > S_MAX:
        raise DomainError(f"s={s!r} is within 1e-6 of the pole of Gamma(1-s)")
    return s


def _gamma_ratio(num: list[float], den: list[float]) -> float:
    """prod Gamma(num) / prod Gamma(den) via log-Gamma with sign tracking."""
    sign = 1.0
    log = 0.0
    for z in num:
        sign *= gammasgn(z)
        log += gammaln(z)
    for z in den:
        sign *= gammasgn(z)
        log -= gammaln(z)
    return sign * math.exp(log)


def normalization_constant(N: int, s: float) -> float:
    """c_{N,s} = s 4^s Gamma(N/2+s) / (pi^{N/2} Gamma(1-s))."""
    if int(N) != N or N < 1:
        raise DomainError(f"dimension must be a positive integer, got N={N!r}")
    s = check_order(s)
    log = (
        math.log(s)
        + s * math.log(4.0)
        + gammaln(0.5 * N + s)
        - 0.5 * N * math.log(math.pi)
        - gammaln(1.0 - s)
    )
    return math.exp(log)


def c1s_reflection(s: float) -> float:
    """Second route to c_{1,s}: (2s/pi) Gamma(2s) sin(pi s)."""
    s = check_order(s)
    return 2.0 * s / math.pi * math.exp(gammaln(2.0 * s)) * math.sin(math.pi * s)


def hardy_coefficient(s: float) -> float:
    """a_s = c_{1,s} / (2s)."""
    return normalization_constant(1, s) / (2.0 * check_order(s))


def extension_constant(s: float) -> float:
    """kappabar_s = Gamma(1-s) / (2^{2s-1} Gamma(s))."""
    s = check_order(s)
    return math.exp(gammaln(1.0 - s) - gammaln(s) - (2.0 * s - 1.0) * math.log(2.0))


@dataclass(frozen=True)
class FracOrder:
    """An order s in (0,1) together with its cached constants."""

    s: float
    c1s: float = field(init=False)
    a_s: float = field(init=False)
    kappabar: float = field(init=False)

    def __post_init__(self) -> None:
        s = check_order(self.s)
        object.__setattr__(self, "s", s)
        c1 = normalization_constant(1, s)
        object.__setattr__(self, "c1s", c1)
        object.__setattr__(self, "a_s", c1 / (2.0 * s))
        object.__setattr__(self, "kappabar", extension_constant(s))

    def cNs(self, N: int) -> float:
        return normalization_constant(N, self.s)


def _dist_to_int(z: float) -> float:
    return abs(z - round(z))


def h1(beta: float, s: float) -> float:
    """B(beta-2s+1, 2s) = Gamma(beta-2s+1) Gamma(2s) / Gamma(beta+1), for beta > 2s-1."""
    s = check_order(s)
    if beta <= 2.0 * s - 1.0:
        raise DomainError(f"h1 needs beta > 2s-1 = {2 * s - 1}, got {beta}")
    return math.exp(gammaln(beta - 2.0 * s + 1.0) + gammaln(2.0 * s) - gammaln(beta + 1.0))


def h2(beta: float, s: float, guard: float = POLE_GUARD) -> float:
    """pi/tan(pi(beta-2s)) + pi/tan(pi s); 1-periodic in beta."""
    s = check_order(s)
    if _dist_to_int(beta - 2.0 * s) < guard:
        raise PoleError(f"h2 has a pole at beta={beta} (beta-2s integer)")
    return math.pi / math.tan(math.pi * (beta - 2.0 * s)) + math.pi / math.tan(math.pi * s)


def full_power_coeff(beta: float, s: float, guard: float = POLE_GUARD) -> float:
    """Coefficient C with (-Delta)^s (x_+)^beta = C (x_+)^(beta-2s) on x > 0.

    Uses -Gamma(beta+1) Gamma(2s-beta) sin(pi(beta-s)) / pi, which is free of
    the 0*inf indeterminacy of the quotient form at beta = 2s-1-m.  For
    beta > 2s, Gamma(2s-beta) at negative non-integer argument is the
    recurrence continuation Gamma(z) = Gamma(z+m)/(z(z+1)...(z+m-1)).
    """
    s = check_order(s)
    beta = float(beta)
    if beta <= -1.0:
        raise DomainError(f"power coefficient needs beta > -1, got {beta}")
    d = beta - 2.0 * s
    if d > -guard and _dist_to_int(d) < guard:
        raise PoleError(f"coefficient has a pole at beta={beta} (beta-2s in Z>=0)")
    sn = math.sin(math.pi * (beta - s))
    if sn == 0.0:
        return 0.0
    z = 2.0 * s - beta
    m = 0
    denom = 1.0
    while z + m <= 0.0:
        denom *= z + m
        m += 1
    g = _gamma_ratio([beta + 1.0, z + m], []) / denom
    return -g * sn / math.pi


def full_power_coeff_quotient(beta: float, s: float) -> float:
    """Original quotient form Gamma(b+1)/Gamma(b-2s+1) sin(pi(b-s))/sin(pi(b-2s)).

    Indeterminate at beta = 2s-1-m; kept as an independent check away from there.
    """
    s = check_order(s)
    rg = 1.0 / _gamma_ratio([beta - 2.0 * s + 1.0], [beta + 1.0])
    return rg * math.sin(math.pi * (beta - s)) / math.sin(math.pi * (beta - 2.0 * s))


def regional_power_coeff(beta: float, s: float, guard: float = POLE_GUARD) -> float:
    """Coefficient C with (-Delta)^s_{R+} x^beta = C x^(beta-2s)."""
    return full_power_coeff(beta, s, guard) - hardy_coefficient(s)


def kappa_s(s: float) -> float:
    """Coefficient of (-Delta)^s_{R+} x = kappa_s x^(1-2s); equals -c_{1,s}/(2s-1)."""
    return regional_power_coeff(1.0, s)
