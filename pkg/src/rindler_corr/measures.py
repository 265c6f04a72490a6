"""Negativity, von Neumann entropy and mutual information for each bipartition.

Entropies are in bits.  Mutual information is always formed from its
definition ``I_XY = S_X + S_Y - S_XY``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import closed_form as cf
from .errors import BracketError, DomainError
from .oracle import Party, Spectrum
from .params import ModePoint, normalization_C2

# eigenvalues in (-NEG_ZERO_TOL, 0) are eigensolver noise, not entanglement
NEG_ZERO_TOL = 1e-12
ENTROPY_SUM_TOL = 1e-10
BISECTION_MAX_ITER = 200


def _point(p) -> ModePoint:
    return p if isinstance(p, ModePoint) else ModePoint(*p)


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=float)


def negativity(s) -> float:
    """Sum of ``|lambda|`` over eigenvalues below ``-NEG_ZERO_TOL``."""
    v = _values(s)
    return float(-np.sum(v[v <= -NEG_ZERO_TOL])) + 0.0  # no negative zero


def negativity_AR_closed(p: ModePoint) -> float:
    """Closed-form AR negativity ``sum_n |lambda^-_n|`` over the two-dimensional blocks.

    Every ``lambda^-_n`` is analytically negative, so no noise threshold applies.
    """
    _, minus = cf.ar_pt_pairs(_point(p))
    return float(-np.sum(minus)) + 0.0


def negativity_ARbar(p: ModePoint) -> float:
    """Negativity of the Alice-transposed A-Rbar reduction, from its 2x2 blocks."""
    _, minus = cf.arbar_pt_pairs(_point(p))
    return negativity(minus)


def negativity_RRbar(p: ModePoint) -> float:
    """Negative part of the spectrum of all ``M_D`` and ``M'_D`` blocks."""
    return negativity(cf.rrbar_pt_eigenvalues(_point(p)))


def entropy(s) -> float:
    """Von Neumann entropy ``-sum p log2 p`` of a spectrum or probability list."""
    v = _values(s)
    if v.size and v.min() < -NEG_ZERO_TOL:
        raise DomainError(f"negative probability {v.min():.3e}")
    total = float(np.sum(v))
    if abs(total - 1.0) > ENTROPY_SUM_TOL:
        raise DomainError(f"probabilities sum to {total!r}, not 1")
    v = v[v > 0]
    return float(-np.sum(v * np.log2(v))) + 0.0


def alice_deficit(p: ModePoint) -> float:
    """``1 - S_A`` evaluated without cancellation.

    ``rho_A = diag(1/2 - d, 1/2 + d)`` with ``d = (N+1) tanh^{2N} r sech^2 r / (2 C^2)``,
    and ``1 - h(1/2 - d) = ((1-2d) log(1-2d) + (1+2d) log(1+2d)) / (2 ln 2)``.
    """
    p = _point(p)
    if p.r == 0.0:
        return 0.0
    h = cf.hyperbolics(p.r)
    d = 0.5 * (p.n_max + 1) * h.power(2 * p.n_max, 1.0, math.log(normalization_C2(p)))
    x = 2.0 * d
    if x < 0.05:
        # sum_k x^{2k} / (k (2k - 1)); the closed form cancels for small x
        x2 = x * x
        total = sum(x2**k / (k * (2 * k - 1)) for k in range(8, 0, -1))
        return total / (2.0 * math.log(2.0))
    lo = (1.0 - x) * math.log1p(-x) if x < 1.0 else 0.0
    return (lo + (1.0 + x) * math.log1p(x)) / (2.0 * math.log(2.0))


@dataclass(frozen=True)
class CorrelationPoint:
    """Every measure at one ``(N, r)``; entropies and informations in bits."""

    n_max: int
    r: float
    neg_AR: float
    neg_ARbar: float
    neg_RRbar: float
    S_A: float
    S_R: float
    S_Rbar: float
    S_AR: float
    S_ARbar: float
    S_RRbar: float
    I_AR: float
    I_ARbar: float
    I_RRbar: float
    deviation: float

    def as_dict(self) -> dict:
        return asdict(self)


MEASURE_FIELDS = tuple(f.name for f in fields(CorrelationPoint))[2:]


def correlation_point(p: ModePoint, measures=None) -> CorrelationPoint:
    """All closed-form measures at ``p``.

    ``measures`` optionally restricts which fields are computed; the rest are
    NaN.  This matters only for ``neg_RRbar``, whose cost grows as ``N^3``.
    """
    p = _point(p)
    wanted = set(MEASURE_FIELDS if measures is None else measures)
    unknown = wanted - set(MEASURE_FIELDS)
    if unknown:
        raise DomainError(f"unknown measures {sorted(unknown)}")
    deficit = alice_deficit(p)
    s_a = 1.0 - deficit
    s_r = entropy(cf.single_party_weights(p, Party.REGION_I))
    s_rbar = entropy(cf.single_party_weights(p, Party.REGION_IV))
    s_ar = entropy(cf.rho_nonzero_eigenvalues(p, "AR"))
    s_arbar = entropy(cf.rho_nonzero_eigenvalues(p, "ARbar"))
    s_rrbar = entropy(cf.rho_nonzero_eigenvalues(p, "RRbar"))
    nan = math.nan
    return CorrelationPoint(
        n_max=p.n_max,
        r=p.r,
        neg_AR=negativity_AR_closed(p) if "neg_AR" in wanted else nan,
        neg_ARbar=negativity_ARbar(p) if "neg_ARbar" in wanted else nan,
        neg_RRbar=negativity_RRbar(p) if "neg_RRbar" in wanted else nan,
        S_A=s_a,
        S_R=s_r,
        S_Rbar=s_rbar,
        S_AR=s_ar,
        S_ARbar=s_arbar,
        S_RRbar=s_rrbar,
        I_AR=s_a + s_r - s_ar,
        I_ARbar=s_a + s_rbar - s_arbar,
        I_RRbar=s_r + s_rbar - s_rrbar,
        deviation=2.0 * deficit,
    )


def conservation_deviation(p: ModePoint) -> float:
    """``2 - (I_AR + I_ARbar) = 2 (1 - S_A)``."""
    return 2.0 * alice_deficit(_point(p))


def _sample_sign_change(f, lo, hi, samples):
    xs = np.linspace(lo, hi, samples + 1)
    ys = [f(float(x)) for x in xs]
    for i in range(samples):
        if ys[i] * ys[i + 1] < 0:
            return float(xs[i]), float(xs[i + 1]), ys[i], ys[i + 1]
    raise BracketError(f"no sign change on [{lo}, {hi}]", zip(xs.tolist(), ys))


def bisect(f, lo, hi, flo=None, fhi=None, xtol=1e-10, ftol=1e-12, max_iter=BISECTION_MAX_ITER):
    """Plain bisection; stops once the bracket is narrower than ``xtol`` and
    ``|f(mid)| < ftol``, or when the bracket can no longer shrink."""
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]", [(lo, flo), (hi, fhi)])
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0 or (hi - lo < xtol and abs(fmid) < ftol) or mid in (lo, hi):
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return mid


def crossing_point(n1: int, n2: int, bracket=(1e-3, 5.0), samples=200) -> float:
    """Squeezing ``r_c`` where the AR negativity curves of ``n1 < n2`` cross.

    The bracket is scanned on ``samples`` intervals for the first strict sign
    change of ``neg_AR(n1, r) - neg_AR(n2, r)`` (both curves start at 1/2 at
    ``r = 0``), which is then bisected.
    """
    if not n1 < n2:
        raise DomainError(f"need n1 < n2, got {n1}, {n2}")
    lo, hi = map(float, bracket)
    if not 0 <= lo < hi:
        raise DomainError(f"invalid bracket {bracket}")

    def f(r):
        return negativity_AR_closed(ModePoint(n1, r)) - negativity_AR_closed(ModePoint(n2, r))

    a, b, fa, fb = _sample_sign_change(f, lo, hi, samples)
    return bisect(f, a, b, fa, fb)


def critical_r(n_max: int, epsilon: float, bracket=(0.0, 30.0)) -> float:
    """Squeezing ``r_l`` at which the conservation deviation reaches ``epsilon``."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    lo, hi = map(float, bracket)

    def f(r):
        return conservation_deviation(ModePoint(n_max, r)) - epsilon

    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise BracketError(f"deviation does not cross {epsilon} on [{lo}, {hi}]", [(lo, flo), (hi, fhi)])
    # relative tolerance; the deviation spans many decades
    return bisect(f, lo, hi, flo, fhi, ftol=1e-12 * epsilon)
