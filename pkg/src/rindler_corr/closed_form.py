"""Closed-form density matrices, partial-transpose blocks and spectra.

Every matrix element is written as ``tanh^k r * sech^{2j} r / C_N(r)^2`` and
evaluated in log space (see :meth:`rindler_corr.params.Hyperbolics.power`).
Forms such as ``n / sinh^2 r`` that are singular at ``r = 0`` are always
rewritten as ``n tanh^{-2} r sech^2 r`` multiplied into the accompanying
``tanh^{2n}`` factor, which is finite everywhere.

Bases follow the oracle's convention: kets are occupation tuples in canonical
party order ``(Alice, region I, region IV)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError
from .oracle import LabeledDensityMatrix, Party, Spectrum
from .params import ModePoint, hyperbolics, normalization_C2, weight_D0, weight_D1

log = logging.getLogger(__name__)

BIPARTITIONS = {
    "AR": (Party.ALICE, Party.REGION_I),
    "ARbar": (Party.ALICE, Party.REGION_IV),
    "RRbar": (Party.REGION_I, Party.REGION_IV),
}
# party whose indices are transposed for each bipartition
TRANSPOSED = {"AR": Party.ALICE, "ARbar": Party.ALICE, "RRbar": Party.REGION_IV}


def parse_bipartition(name) -> str:
    key = str(name).replace("-", "").replace("_", "")
    for canonical in BIPARTITIONS:
        if key.lower() == canonical.lower():
            return canonical
    raise DomainError(f"unknown bipartition {name!r}; expected one of {sorted(BIPARTITIONS)}")


class _Terms:
    """Callable ``(k, j) -> tanh^k r sech^{2j} r / C^2`` for one mode point."""

    def __init__(self, p: ModePoint):
        self.p = p
        self.h = hyperbolics(p.r)
        self.log_c2 = math.log(normalization_C2(p))

    def __call__(self, k, j):
        return self.h.power(k, j, self.log_c2)


def _point(p) -> ModePoint:
    return p if isinstance(p, ModePoint) else ModePoint(*p)


def _matrix(parties, n, elements) -> LabeledDensityMatrix:
    dims = (2 if parties[0] is Party.ALICE else n + 1, n + 1)
    m = np.zeros((dims[0] * dims[1],) * 2)
    for (ket, bra), value in elements.items():
        i = ket[0] * dims[1] + ket[1]
        j = bra[0] * dims[1] + bra[1]
        m[i, j] += value
        if i != j:
            m[j, i] += value
    return LabeledDensityMatrix(parties, dims, m)


def rho_AR(p: ModePoint) -> LabeledDensityMatrix:
    """Alice--Rob reduction over kets ``|a, m_I>``."""
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    el = {}
    for k in range(n):
        el[(0, k), (0, k)] = s(2 * k, 1)
        el[(0, k), (1, k + 1)] = math.sqrt(k + 1) * s(2 * k, 1.5)
        el[(1, k + 1), (1, k + 1)] = (k + 1) * s(2 * k, 2)
    el[(0, n), (0, n)] = s(2 * n, 1)
    return _matrix(BIPARTITIONS["AR"], n, el)


def rho_ARbar(p: ModePoint) -> LabeledDensityMatrix:
    """Alice--AntiRob reduction over kets ``|a, m_IV>``; couples ``|0,n+1>`` with ``|1,n>``."""
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    el = {}
    for k in range(n):
        el[(0, k), (0, k)] = s(2 * k, 1)
        el[(0, k + 1), (1, k)] = math.sqrt(k + 1) * s(2 * k + 1, 1.5)
        el[(1, k), (1, k)] = (k + 1) * s(2 * k, 2)
    el[(0, n), (0, n)] = s(2 * n, 1)
    return _matrix(BIPARTITIONS["ARbar"], n, el)


def rho_RRbar(p: ModePoint) -> LabeledDensityMatrix:
    """Rob--AntiRob reduction: the direct sum ``X (+) Y`` of two rank-one blocks.

    ``X`` lives on ``{|n,n>}`` and ``Y`` on ``{|n+1,n>}``.
    """
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    el = {}
    for i in range(n + 1):
        for j in range(i, n + 1):
            el[(i, i), (j, j)] = s(i + j, 1)
    for i in range(n):
        for j in range(i, n):
            el[(i + 1, i), (j + 1, j)] = math.sqrt((i + 1) * (j + 1)) * s(i + j, 2)
    return _matrix(BIPARTITIONS["RRbar"], n, el)


def single_party_weights(p: ModePoint, party) -> np.ndarray:
    """Diagonal of the single-party reduction (all three are diagonal in Fock basis)."""
    p = _point(p)
    party = Party.parse(party)
    n = p.n_max
    if party is Party.ALICE:
        c2 = normalization_C2(p)
        return np.array([weight_D0(p) / c2, weight_D1(p) / c2])
    s = _Terms(p)
    k = np.arange(n + 1)
    if party is Party.REGION_I:
        # (tanh^{2n}/cosh^2)(1 + n/sinh^2 r)
        w = s(2 * k, 1)
        w[1:] += k[1:] * s(2 * k[1:] - 2, 2)
        return w
    w = s(2 * k, 1)
    w[:-1] += (k[:-1] + 1) * s(2 * k[:-1], 2)
    return w


def rho_single(p: ModePoint, party) -> LabeledDensityMatrix:
    """Single-party density matrix for Alice, region I or region IV."""
    party = Party.parse(party)
    w = single_party_weights(p, party)
    return LabeledDensityMatrix((party,), (len(w),), np.diag(w))


@dataclass(frozen=True)
class BlockSet:
    """A block-diagonal decomposition with explicit per-block kets.

    ``provenance[i]`` tags block ``i`` with one of ``AR_2x2``, ``ARbar_2x2``,
    ``RRbar_MD``, ``RRbar_MprimeD`` or ``singleton``.
    """

    parties: tuple
    dims: tuple
    blocks: tuple
    block_bases: tuple
    provenance: tuple

    def __post_init__(self):
        size = math.prod(self.dims)
        total = sum(len(b) for b in self.block_bases)
        if total != size:
            raise DomainError(f"blocks cover {total} kets, expected {size}")
        for blk, kets in zip(self.blocks, self.block_bases):
            if blk.shape != (len(kets), len(kets)):
                raise DomainError(f"block shape {blk.shape} does not match basis {kets}")

    def assemble(self) -> LabeledDensityMatrix:
        """Permute the direct sum back into the lexicographic product basis."""
        size = math.prod(self.dims)
        m = np.zeros((size, size))
        seen = set()
        for blk, kets in zip(self.blocks, self.block_bases):
            idx = [int(np.ravel_multi_index(k, self.dims)) for k in kets]
            if seen.intersection(idx):
                raise DomainError(f"basis {kets} overlaps another block")
            seen.update(idx)
            m[np.ix_(idx, idx)] = blk
        return LabeledDensityMatrix(self.parties, self.dims, m)

    def eigenvalues(self) -> np.ndarray:
        out = [_block_eigvalsh(b) for b in self.blocks]
        return np.sort(np.concatenate(out)) if out else np.zeros(0)

    def spectrum(self) -> Spectrum:
        """Block-wise spectrum, certified by eigenvector residuals."""
        values, residual = [], 0.0
        for b in self.blocks:
            w, v = np.linalg.eigh(b)
            values.append(w)
            residual = max(residual, float(np.max(np.linalg.norm(b @ v - v * w, axis=0))))
        return Spectrum(np.concatenate(values), residual)


def _block_eigvalsh(b: np.ndarray) -> np.ndarray:
    if b.shape[0] == 1:
        return b.diagonal().copy()
    if b.shape[0] == 2:
        return _sym2x2_eigs(b[0, 0], b[1, 1], b[0, 1])
    return np.linalg.eigvalsh(b)


def _sym2x2_eigs(a, b, c) -> np.ndarray:
    """Eigenvalues of ``[[a, c], [c, b]]``, the small one via ``det / lambda_max``."""
    mean = 0.5 * (a + b)
    rad = math.hypot(0.5 * (a - b), c)
    big = mean + rad if mean >= 0 else mean - rad
    det = a * b - c * c
    small = det / big if big != 0 else 0.0
    return np.sort(np.array([small, big]))


def pt_blocks_AR(p: ModePoint) -> BlockSet:
    """Alice-transposed ``rho_AR``: N blocks on ``{|0,n+1>, |1,n>}`` plus ``|0,0>`` and ``|1,N>``."""
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    blocks, bases, tags = [], [], []
    for k in range(n):
        corner = k * s(2 * k - 2, 2) if k else 0.0
        off = math.sqrt(k + 1) * s(2 * k, 1.5)
        blocks.append(np.array([[s(2 * k + 2, 1), off], [off, corner]]))
        bases.append(((0, k + 1), (1, k)))
        tags.append("AR_2x2")
    blocks += [np.array([[s(0, 1)]]), np.array([[n * s(2 * n - 2, 2)]])]
    bases += [((0, 0),), ((1, n),)]
    tags += ["singleton", "singleton"]
    return BlockSet(BIPARTITIONS["AR"], (2, n + 1), tuple(blocks), tuple(bases), tuple(tags))


def pt_blocks_ARbar(p: ModePoint) -> BlockSet:
    """Alice-transposed ``rho_ARbar``: N blocks on ``{|0,n>, |1,n+1>}`` plus ``|1,0>`` and ``|0,N>``.

    The ket ``|1,N>`` carries no weight (the one-particle state stops at
    region-IV occupation ``N-1``), so the last block has a zero corner and a
    strictly negative determinant whenever ``r > 0``.
    """
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    blocks, bases, tags = [], [], []
    for k in range(n):
        corner = (k + 2) * s(2 * k + 2, 2) if k < n - 1 else 0.0
        off = math.sqrt(k + 1) * s(2 * k + 1, 1.5)
        blocks.append(np.array([[s(2 * k, 1), off], [off, corner]]))
        bases.append(((0, k), (1, k + 1)))
        tags.append("ARbar_2x2")
    blocks += [np.array([[s(0, 2)]]), np.array([[s(2 * n, 1)]])]
    bases += [((1, 0),), ((0, n),)]
    tags += ["singleton", "singleton"]
    return BlockSet(BIPARTITIONS["ARbar"], (2, n + 1), tuple(blocks), tuple(bases), tuple(tags))


def rrbar_block_basis(n_max: int, d: int, primed: bool) -> tuple:
    """Kets of ``M_D`` (occupation sum ``D-1``) or ``M'_D`` (sum ``2N-D+1``).

    Ordered along the tridiagonal chain: ``|j, s-j>, |s-j, j>, |j+1, s-j-1>, ...``.
    """
    if not 1 <= d <= (n_max if primed else n_max + 1):
        raise DomainError(f"block index D={d} out of range for N={n_max}")
    offset = n_max - d + 1 if primed else 0
    total = 2 * n_max - d + 1 if primed else d - 1
    kets = []
    for pos in range(1, d + 1):
        j = pos // 2
        if pos % 2:
            kets.append((offset + j, total - offset - j))
        else:
            kets.append((total - offset - j + 1, offset + j - 1))
    return tuple(kets)


def rrbar_block_elements(p: ModePoint, d: int, primed: bool) -> np.ndarray:
    """Chain elements ``a_1..a_D`` (or ``b_1..b_D``) of one R-Rbar block."""
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    pos = np.arange(1, d + 1)
    half = pos // 2
    if primed:
        odd = s(2 * n - d + 1, 1)
        even = np.sqrt((n + 1.0 - half) * (half + n - d + 1.0)) * s(2 * n - d, 2)
    else:
        odd = s(d - 1, 1)
        even = np.sqrt((d - half) * half) * s(d - 2, 2) if d >= 2 else np.zeros(d)
    return np.where(pos % 2 == 1, odd, even)


def _chain_matrix(elements: np.ndarray) -> np.ndarray:
    d = len(elements)
    m = np.diag(elements[:-1], 1) + np.diag(elements[:-1], -1)
    m[d - 1, d - 1] = elements[-1]
    return m


def pt_blocks_RRbar(p: ModePoint) -> BlockSet:
    """Region-IV-transposed ``rho_RRbar`` as ``M_1..M_{N+1}, M'_N..M'_1``."""
    p = _point(p)
    n = p.n_max
    blocks, bases, tags = [], [], []
    for d in range(1, n + 2):
        blocks.append(_chain_matrix(rrbar_block_elements(p, d, False)))
        bases.append(rrbar_block_basis(n, d, False))
        tags.append("RRbar_MD")
    for d in range(n, 0, -1):
        blocks.append(_chain_matrix(rrbar_block_elements(p, d, True)))
        bases.append(rrbar_block_basis(n, d, True))
        tags.append("RRbar_MprimeD")
    return BlockSet(BIPARTITIONS["RRbar"], (n + 1, n + 1), tuple(blocks), tuple(bases), tuple(tags))


def rrbar_pt_eigenvalues(p: ModePoint) -> np.ndarray:
    """Eigenvalues of the R-Rbar partial transpose without assembling any dense block."""
    p = _point(p)
    out = []
    for primed, ds in ((False, range(1, p.n_max + 2)), (True, range(1, p.n_max + 1))):
        for d in ds:
            e = rrbar_block_elements(p, d, primed)
            if d == 1:
                out.append(e)
                continue
            diag = np.zeros(d)
            diag[-1] = e[-1]
            out.append(scipy.linalg.eigvalsh_tridiagonal(diag, e[:-1]))
    return np.concatenate(out)


def ar_pt_pairs(p: ModePoint):
    """``(lambda_plus, lambda_minus)`` arrays of the N two-dimensional AR blocks.

    ``lambda_plus + lambda_minus`` and ``lambda_plus * lambda_minus`` are the
    block trace and determinant; the determinant simplifies to
    ``-tanh^{4n} r sech^6 r / C^4``, so ``lambda_minus`` is formed as
    ``det / lambda_plus`` and never loses digits to cancellation.
    """
    p = _point(p)
    s = _Terms(p)
    k = np.arange(p.n_max, dtype=float)
    top = s(2 * k + 2, 1)
    corner = np.zeros_like(k)
    corner[1:] = k[1:] * s(2 * k[1:] - 2, 2)
    off2 = (k + 1) * s(2 * k, 1.5) ** 2
    mean = 0.5 * (top + corner)
    plus = mean + np.sqrt((0.5 * (top - corner)) ** 2 + off2)
    log_c2 = s.log_c2
    det = -s.h.power(4 * k, 3.0, 2 * log_c2)
    minus = np.divide(det, plus, out=np.zeros_like(plus), where=plus > 0)
    return plus, minus


def arbar_pt_pairs(p: ModePoint):
    """``(lambda_plus, lambda_minus)`` arrays of the N A-Rbar blocks of :func:`pt_blocks_ARbar`.

    Determinants are ``tanh^{4n+2} r sech^6 r / C^4`` for ``n < N-1`` and
    ``-N tanh^{4N-2} r sech^6 r / C^4`` for the last block.
    """
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    k = np.arange(n, dtype=float)
    top = s(2 * k, 1)
    corner = (k + 2) * s(2 * k + 2, 2)
    corner[-1] = 0.0
    off2 = (k + 1) * s(2 * k + 1, 1.5) ** 2
    plus = 0.5 * (top + corner) + np.sqrt((0.5 * (top - corner)) ** 2 + off2)
    det = s.h.power(4 * k + 2, 3.0, 2 * s.log_c2)
    det[-1] *= -n
    minus = np.divide(det, plus, out=np.zeros_like(plus), where=plus > 0)
    return plus, minus


def spectrum_AR_pt(p: ModePoint) -> Spectrum:
    """All ``2N + 2`` eigenvalues of the Alice-transposed ``rho_AR``.

    The two singleton values are ``1 / (C^2 cosh^2 r)`` and
    ``N tanh^{2N-2} r / (C^2 cosh^4 r)``; the latter is cross-checked against
    the ``|1,N>`` diagonal element of :func:`pt_blocks_AR`.
    """
    p = _point(p)
    n, s = p.n_max, _Terms(p)
    plus, minus = ar_pt_pairs(p)
    lam_n = s(0, 1)
    lam_n1 = n * s(2 * n - 2, 2)
    singleton = pt_blocks_AR(p).blocks[-1][0, 0]
    if not math.isclose(lam_n1, singleton, rel_tol=1e-12, abs_tol=1e-300):
        log.warning("lambda_{N+1} formula %.17g disagrees with block value %.17g at %s", lam_n1, singleton, p)
        lam_n1 = singleton
    return Spectrum(np.concatenate([plus, minus, [lam_n, lam_n1]]))


def rho_nonzero_eigenvalues(p: ModePoint, bipartition) -> np.ndarray:
    """Nonzero eigenvalues of a bipartite reduction (the zeros are implied)."""
    p = _point(p)
    key = parse_bipartition(bipartition)
    n, s = p.n_max, _Terms(p)
    k = np.arange(n + 1)
    if key == "AR":
        # tanh^{2n}/(C^2 cosh^2)(1 + (n+1)/cosh^2) for n < N, then tanh^{2N}/(C^2 cosh^2)
        lam = s(2 * k, 1)
        lam[:-1] += (k[:-1] + 1) * s(2 * k[:-1], 2)
        return lam
    if key == "ARbar":
        # tanh^{2n}/(C^2 cosh^2)(1 + n/sinh^2), n = 0..N
        lam = s(2 * k, 1)
        lam[1:] += k[1:] * s(2 * k[1:] - 2, 2)
        return lam
    c2 = normalization_C2(p)
    return np.array([weight_D0(p) / c2, weight_D1(p) / c2])


def spectrum_rho(p: ModePoint, bipartition) -> Spectrum:
    """Full spectrum of a bipartite reduction, zero-padded to the matrix dimension."""
    p = _point(p)
    key = parse_bipartition(bipartition)
    nonzero = rho_nonzero_eigenvalues(p, key)
    dim = 2 * (p.n_max + 1) if key != "RRbar" else (p.n_max + 1) ** 2
    return Spectrum(np.concatenate([nonzero, np.zeros(dim - len(nonzero))]))


def pt_blocks(p: ModePoint, bipartition) -> BlockSet:
    key = parse_bipartition(bipartition)
    return {"AR": pt_blocks_AR, "ARbar": pt_blocks_ARbar, "RRbar": pt_blocks_RRbar}[key](p)


def rho_bipartite(p: ModePoint, bipartition) -> LabeledDensityMatrix:
    key = parse_bipartition(bipartition)
    return {"AR": rho_AR, "ARbar": rho_ARbar, "RRbar": rho_RRbar}[key](p)
