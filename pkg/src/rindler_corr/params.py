"""Physical parameters and the scalar functions every other module consumes.

The independent variable throughout is a :class:`ModePoint`: the occupation
bound ``N`` and the squeezing parameter ``r``.  Acceleration enters only
through the dimensionless ratio ``omega_over_a`` (mode frequency times the
speed of light over proper acceleration), mapped to ``r`` by
``tanh r = exp(-pi * omega_over_a)``.

All powers of ``tanh r`` and ``sech r`` are formed in log space so that
``tanh(r)**(2N)`` stays accurate for large ``N`` and large ``r``, and the
convention ``0**0 == 1`` holds at ``r = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# exp(-2r) must stay representable with margin for products of sech^2 r.
R_MAX = 150.0


@dataclass(frozen=True)
class ModePoint:
    """Occupation bound ``n_max`` (N >= 1) and squeezing ``r`` (finite, >= 0)."""

    n_max: int
    r: float

    def __post_init__(self):
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, (int, np.integer)):
            raise DomainError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")
        r = float(self.r)
        if not math.isfinite(r) or r < 0:
            raise DomainError(f"r must be finite and non-negative, got {self.r!r}")
        if r > R_MAX:
            raise DomainError(f"r = {r} exceeds the double-precision limit {R_MAX}")
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class AccelerationSpec:
    """The ratio ``k0 c / a``; must be finite and strictly positive."""

    omega_over_a: float

    def __post_init__(self):
        x = float(self.omega_over_a)
        if not math.isfinite(x) or x <= 0:
            raise DomainError(f"omega_over_a must be finite and > 0, got {self.omega_over_a!r}")
        object.__setattr__(self, "omega_over_a", x)


def squeezing_from_acceleration(spec: AccelerationSpec) -> float:
    """Return ``r = artanh(exp(-pi * omega_over_a))``."""
    if not isinstance(spec, AccelerationSpec):
        spec = AccelerationSpec(spec)
    x = math.pi * spec.omega_over_a
    y = math.exp(-x)
    if y < 0.5:
        return math.atanh(y)
    # 1 - y without cancellation for y close to 1
    q = -math.expm1(-x)
    return 0.5 * (math.log1p(1.0 - q) - math.log(q))


def acceleration_from_squeezing(r: float) -> float:
    """Inverse map: ``omega_over_a = -log(tanh r) / pi``; ``inf`` at ``r = 0``."""
    r = float(r)
    if not math.isfinite(r) or r < 0:
        raise DomainError(f"r must be finite and non-negative, got {r!r}")
    if r == 0.0:
        return math.inf
    return -hyperbolics(r).log_tanh / math.pi


@dataclass(frozen=True)
class Hyperbolics:
    """``tanh r`` and ``sech^2 r`` together with their logarithms."""

    r: float
    tanh: float
    log_tanh: float
    sech2: float
    log_sech2: float

    def power(self, k, j=0.0, log_scale=0.0):
        """``tanh(r)**k * sech(r)**(2j) / exp(log_scale)``, with ``0**0 == 1``.

        ``k`` may be a scalar or an integer array; ``k`` must be >= 0.
        """
        k_arr = np.asarray(k, dtype=float)
        base = j * self.log_sech2 - log_scale
        if self.r == 0.0:
            out = np.where(k_arr == 0, math.exp(base), 0.0)
        else:
            out = np.exp(k_arr * self.log_tanh + base)
        return float(out) if out.ndim == 0 else out


def hyperbolics(r: float) -> Hyperbolics:
    r = float(r)
    if r == 0.0:
        return Hyperbolics(0.0, 0.0, -math.inf, 1.0, 0.0)
    e = math.exp(-2.0 * r)
    # log tanh r = -2 atanh(e^{-2r}) keeps relative accuracy as tanh r -> 1
    log_tanh = math.log(math.tanh(r)) if r < 0.5 else -2.0 * math.atanh(e)
    log_sech2 = math.log(4.0) - 2.0 * r - 2.0 * math.log1p(e)
    return Hyperbolics(r, math.tanh(r), log_tanh, math.exp(log_sech2), log_sech2)


def _point(p) -> ModePoint:
    return p if isinstance(p, ModePoint) else ModePoint(*p)


def weight_D0(p: ModePoint) -> float:
    """Vacuum weight ``sum_{n<=N} tanh^{2n} r / cosh^2 r = 1 - tanh^{2(N+1)} r``."""
    p = _point(p)
    if p.r == 0.0:
        return 1.0
    h = hyperbolics(p.r)
    return -math.expm1(2 * (p.n_max + 1) * h.log_tanh)


def weight_D1(p: ModePoint) -> float:
    """One-particle weight ``1 - (1 + N sech^2 r) tanh^{2N} r``.

    Equals ``sum_{n<N} (n+1) tanh^{2n} r / cosh^4 r``; the sum is used when
    the closed form would lose digits to cancellation (large ``r``).
    """
    p = _point(p)
    if p.r == 0.0:
        return 1.0
    h = hyperbolics(p.r)
    n = p.n_max
    t2n = math.exp(2 * n * h.log_tanh)
    closed = -math.expm1(2 * n * h.log_tanh) - n * h.sech2 * t2n
    if closed >= 0.25:
        return closed
    k = np.arange(n, dtype=float)
    terms = (k + 1.0) * h.power(2 * k, 2.0)
    return float(np.sum(terms[::-1]))


def normalization_C2(p: ModePoint) -> float:
    """Squared normalization ``C_N(r)^2 = D0 + D1``."""
    p = _point(p)
    return weight_D0(p) + weight_D1(p)


def normalization_C(p: ModePoint) -> float:
    """``C_N(r) = sqrt(2 - tanh^{2N} r (tanh^2 r + 1 + N / cosh^2 r))``."""
    return math.sqrt(normalization_C2(p))


def tail_bound(p: ModePoint) -> float:
    """Upper bound ``tanh^{2N} r (N + 2)`` on the weight ``2 - C^2`` cut by the bound."""
    p = _point(p)
    if p.r == 0.0:
        return 0.0
    return math.exp(2 * p.n_max * hyperbolics(p.r).log_tanh) * (p.n_max + 2)
