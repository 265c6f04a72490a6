"""Brute-force ground truth built from the dense tripartite amplitude tensor.

Nothing here knows the closed-form matrices: the state is written down from
its Fock expansion, reductions are plain tensor contractions, and spectra come
from a cyclic Jacobi eigensolver.  The closed-form module is checked against
these routines, never the other way round.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ConvergenceError, DomainError
from .params import ModePoint, hyperbolics, normalization_C2

DEFAULT_MAX_ENTRIES = 2_000_000


class Party(str, enum.Enum):
    """Subsystems in canonical tensor order: Alice, region I (Rob), region IV (AntiRob)."""

    ALICE = "A"
    REGION_I = "R"
    REGION_IV = "Rbar"

    @classmethod
    def parse(cls, value) -> "Party":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            pass
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise DomainError(f"unknown party {value!r}") from None


PARTY_ORDER = (Party.ALICE, Party.REGION_I, Party.REGION_IV)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureStateTensor:
    """Real amplitudes indexed by ``(alice, occ_I, occ_IV)``."""

    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))

    @property
    def dims(self):
        return self.amplitudes.shape

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.amplitudes**2)))


@dataclass(frozen=True)
class LabeledDensityMatrix:
    """Real symmetric matrix over the lexicographic product basis of ``parties``.

    The basis ket at row ``i`` is ``basis_order[i]``, a tuple of occupations in
    the order of ``parties``.
    """

    parties: tuple
    dims: tuple
    entries: np.ndarray
    basis_order: tuple = field(init=False, repr=False)

    def __post_init__(self):
        parties = tuple(Party.parse(q) for q in self.parties)
        dims = tuple(int(d) for d in self.dims)
        if len(parties) != len(dims):
            raise DomainError("parties and dims differ in length")
        entries = _frozen(self.entries)
        size = math.prod(dims)
        if entries.shape != (size, size):
            raise DomainError(f"entries shape {entries.shape} does not match dims {dims}")
        object.__setattr__(self, "parties", parties)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "basis_order", tuple(itertools.product(*(range(d) for d in dims))))

    def index(self, ket) -> int:
        return int(np.ravel_multi_index(tuple(ket), self.dims))

    def element(self, bra_ket, ket) -> float:
        return float(self.entries[self.index(bra_ket), self.index(ket)])

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def as_tensor(self) -> np.ndarray:
        return self.entries.reshape(self.dims + self.dims)


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues plus the max eigenpair residual ``||Mv - lambda v||``.

    ``residual`` is ``None`` for spectra evaluated from analytic formulas,
    where no eigenvectors exist to certify.
    """

    values: np.ndarray
    residual: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.sort(np.asarray(self.values, dtype=float))))

    def __len__(self):
        return len(self.values)

    def nonzero(self, tol=1e-14) -> np.ndarray:
        return self.values[np.abs(self.values) > tol]


def build_tripartite_state(p: ModePoint, max_entries: int = DEFAULT_MAX_ENTRIES) -> PureStateTensor:
    """Dense amplitudes of ``(|0>|0_N> + |1>|1_N>) / C_N`` in the Rindler basis."""
    if not isinstance(p, ModePoint):
        p = ModePoint(*p)
    n = p.n_max
    size = 2 * (n + 1) ** 2
    if size > max_entries:
        raise CapacityError(f"oracle tensor would hold {size} entries (cap {max_entries})")
    h = hyperbolics(p.r)
    log_c = 0.5 * math.log(normalization_C2(p))
    psi = np.zeros((2, n + 1, n + 1))
    occ = np.arange(n + 1)
    # tanh^n r / (C cosh r)
    psi[0, occ, occ] = h.power(occ, 0.5, log_c)
    # sqrt(n+1) tanh^n r / (C cosh^2 r)
    low = occ[:-1]
    psi[1, low + 1, low] = np.sqrt(low + 1.0) * h.power(low, 1.0, log_c)
    return PureStateTensor(n, psi)


def _parse_keep(keep) -> tuple:
    if isinstance(keep, (str, Party)):
        keep = [keep]
    parties = {Party.parse(q) for q in keep}
    if not parties:
        raise DomainError("keep must name at least one party")
    return tuple(q for q in PARTY_ORDER if q in parties)


def partial_trace(state: PureStateTensor, keep) -> LabeledDensityMatrix:
    """Reduced density matrix over ``keep``, parties in canonical order."""
    kept = _parse_keep(keep)
    psi = state.amplitudes
    letters = "abc"
    ket = "".join(letters)
    bra = "".join(letters[i] if PARTY_ORDER[i] not in kept else letters[i].upper() for i in range(3))
    out_ket = "".join(letters[PARTY_ORDER.index(q)] for q in kept)
    out_bra = out_ket.upper()
    rho = np.einsum(f"{ket},{bra}->{out_ket}{out_bra}", psi, psi)
    dims = tuple(psi.shape[PARTY_ORDER.index(q)] for q in kept)
    size = math.prod(dims)
    return LabeledDensityMatrix(kept, dims, rho.reshape(size, size))


def partial_transpose(rho: LabeledDensityMatrix, transposed_party) -> LabeledDensityMatrix:
    """Swap the ket and bra indices of one party; other parties untouched."""
    party = Party.parse(transposed_party)
    if party not in rho.parties:
        raise DomainError(f"party {party.value} not in {[q.value for q in rho.parties]}")
    k = len(rho.parties)
    i = rho.parties.index(party)
    axes = list(range(2 * k))
    axes[i], axes[k + i] = axes[k + i], axes[i]
    tensor = rho.as_tensor().transpose(axes)
    size = math.prod(rho.dims)
    return LabeledDensityMatrix(rho.parties, rho.dims, tensor.reshape(size, size))


def jacobi_eigh(m, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi rotations for a dense real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns.
    Stops when the off-diagonal Frobenius norm drops below ``tol * ||m||_F``.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        return np.diag(a).copy(), v
    threshold = tol * scale
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < threshold:
            return np.diag(a).copy(), v
        rows, cols = np.nonzero(np.triu(np.abs(a) > threshold * 1e-3 / n, k=1))
        for p, q in zip(rows.tolist(), cols.tolist()):
            apq = a[p, q]
            if apq == 0.0:
                continue
            app, aqq = a[p, p], a[q, q]
            theta = (aqq - app) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
            c = 1.0 / math.hypot(1.0, t)
            s = t * c
            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            a[p, :] = a[:, p]
            a[q, :] = a[:, q]
            a[p, p] = app - t * apq
            a[q, q] = aqq + t * apq
            a[p, q] = a[q, p] = 0.0
            vp = v[:, p].copy()
            v[:, p] = c * vp - s * v[:, q]
            v[:, q] = s * vp + c * v[:, q]
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (n={n})")


def numeric_spectrum(m) -> Spectrum:
    """All eigenvalues of a symmetric matrix with a residual certificate."""
    if isinstance(m, LabeledDensityMatrix):
        m = m.entries
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.linalg.norm(m)))
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > 1e-12 * scale:
        raise DomainError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    sym = 0.5 * (m + m.T)
    w, v = jacobi_eigh(sym)
    residual = float(np.max(np.linalg.norm(sym @ v - v * w, axis=0))) if len(w) else 0.0
    return Spectrum(w, residual)
