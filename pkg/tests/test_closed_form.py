import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rindler_corr import closed_form as cf
from rindler_corr.errors import DomainError
from rindler_corr.oracle import (
    PARTY_ORDER,
    build_tripartite_state,
    numeric_spectrum,
    partial_trace,
    partial_transpose,
)
from rindler_corr.params import ModePoint, normalization_C2

from conftest import R_GRID_13, R_HALF

A, R, RB = PARTY_ORDER
GRID = [(n, r) for n in range(1, 7) for r in R_GRID_13]


def oracle_rho(p, name):
    state = build_tripartite_state(p)
    if name in cf.BIPARTITIONS:
        return partial_trace(state, cf.BIPARTITIONS[name])
    return partial_trace(state, [name])


def oracle_pt(p, name):
    return partial_transpose(oracle_rho(p, name), cf.TRANSPOSED[name])


def uniform_corner_arbar_block(p, k):
    # 2x2 A-Rbar block with the corner (k+2) tanh^2/cosh^2 applied to every k, the last included
    t, c2 = math.tanh(p.r), math.cosh(p.r) ** 2
    pref = t ** (2 * k) / (normalization_C2(p) * c2)
    off = t / math.sqrt(c2) * math.sqrt(k + 1)
    return pref * np.array([[1.0, off], [off, t**2 / c2 * (k + 2)]])


@pytest.mark.parametrize("n, r", GRID)
def test_matrices_match_oracle(n, r):
    p = ModePoint(n, r)
    for name in ("AR", "ARbar", "RRbar", "A", "R", "Rbar"):
        mine = cf.rho_bipartite(p, name) if name in cf.BIPARTITIONS else cf.rho_single(p, name)
        ref = oracle_rho(p, name)
        assert mine.parties == ref.parties and mine.basis_order == ref.basis_order
        assert np.max(np.abs(mine.entries - ref.entries)) < 1e-12, name


@pytest.mark.parametrize("n, r", GRID)
def test_block_reassembly_matches_oracle(n, r):
    p = ModePoint(n, r)
    for name in cf.BIPARTITIONS:
        blocks = cf.pt_blocks(p, name)
        ref = oracle_pt(p, name)
        full = blocks.assemble()
        assert full.basis_order == ref.basis_order
        assert np.max(np.abs(full.entries - ref.entries)) < 1e-12, name
        for b in blocks.blocks:
            assert np.max(np.abs(b - b.T)) < 1e-14


@pytest.mark.parametrize("n, r", GRID)
def test_spectra_match_oracle(n, r):
    p = ModePoint(n, r)
    for name in cf.BIPARTITIONS:
        ref_pt = numeric_spectrum(oracle_pt(p, name)).values
        assert np.max(np.abs(cf.pt_blocks(p, name).eigenvalues() - ref_pt)) < 1e-11
        ref_rho = numeric_spectrum(oracle_rho(p, name)).values
        assert np.max(np.abs(cf.spectrum_rho(p, name).values - ref_rho)) < 1e-11
    ar = numeric_spectrum(oracle_pt(p, "AR")).values
    assert np.max(np.abs(cf.spectrum_AR_pt(p).values - ar)) < 1e-11
    rr = numeric_spectrum(oracle_pt(p, "RRbar")).values
    assert np.max(np.abs(np.sort(cf.rrbar_pt_eigenvalues(p)) - rr)) < 1e-11


def test_bell_matrices_at_zero_squeezing():
    p = ModePoint(1, 0.0)
    ar = cf.rho_AR(p)
    bell = np.zeros((4, 4))
    i, j = ar.index((0, 0)), ar.index((1, 1))
    bell[np.ix_([i, j], [i, j])] = 0.5
    assert np.allclose(ar.entries, bell, atol=1e-15)
    arbar = cf.rho_ARbar(p)
    assert np.allclose(arbar.entries, np.diag([0.5, 0.0, 0.5, 0.0]), atol=1e-15)
    rr = cf.rho_RRbar(p)
    expected = np.zeros((4, 4))
    expected[rr.index((0, 0)), rr.index((0, 0))] = 0.5
    expected[rr.index((1, 0)), rr.index((1, 0))] = 0.5
    assert np.allclose(rr.entries, expected, atol=1e-15)


@pytest.mark.parametrize("n, r", [(1, 0.3), (4, 1.2), (9, 2.7)])
def test_rho_AR_last_diagonal(n, r):
    p = ModePoint(n, r)
    m = cf.rho_AR(p)
    expected = math.tanh(r) ** (2 * n) / (normalization_C2(p) * math.cosh(r) ** 2)
    assert m.element((0, n), (0, n)) == pytest.approx(expected, rel=1e-13)


def test_rho_ARbar_coupling_pairs():
    n = 4
    m = cf.rho_ARbar(ModePoint(n, 0.9))
    coupled = set()
    for i, ket in enumerate(m.basis_order):
        for j, bra in enumerate(m.basis_order):
            if i < j and abs(m.entries[i, j]) > 0 and ket[0] != bra[0]:
                coupled.add((ket, bra))
    assert coupled == {((0, k + 1), (1, k)) for k in range(n)}


@pytest.mark.parametrize("n, r", [(1, 0.5), (3, 1.0), (6, 2.9), (4, 0.0)])
def test_rrbar_is_rank_one_direct_sum(n, r):
    m = cf.rho_RRbar(ModePoint(n, r))
    x_idx = [m.index((k, k)) for k in range(n + 1)]
    y_idx = [m.index((k + 1, k)) for k in range(n)]
    x = m.entries[np.ix_(x_idx, x_idx)]
    y = m.entries[np.ix_(y_idx, y_idx)]
    rest = m.entries.copy()
    rest[np.ix_(x_idx, x_idx)] = 0
    rest[np.ix_(y_idx, y_idx)] = 0
    assert not np.any(rest)
    assert np.linalg.matrix_rank(x, tol=1e-10) == 1
    if r > 0:
        assert np.linalg.matrix_rank(y, tol=1e-10) == 1


def test_rrbar_X_Y_elements():
    n, r = 3, 0.7
    p = ModePoint(n, r)
    m = cf.rho_RRbar(p)
    t, c2 = math.tanh(r), math.cosh(r) ** 2
    C2 = normalization_C2(p)
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            x = t ** (i + j - 2) / (C2 * c2)
            assert m.element((i - 1, i - 1), (j - 1, j - 1)) == pytest.approx(x, rel=1e-13)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            y = math.sqrt(i * j) * t ** (i + j - 2) / (C2 * c2**2)
            assert m.element((i, i - 1), (j, j - 1)) == pytest.approx(y, rel=1e-13)


@pytest.mark.parametrize("n, r", [(1, 0.0), (2, 1.0), (5, 3.0), (6, 0.25)])
def test_density_matrices_psd(n, r):
    p = ModePoint(n, r)
    for name in cf.BIPARTITIONS:
        assert numeric_spectrum(cf.rho_bipartite(p, name)).values.min() >= -1e-12
    for party in PARTY_ORDER:
        assert cf.single_party_weights(p, party).min() >= 0


def test_alice_at_hand_point():
    assert np.allclose(cf.rho_single(ModePoint(1, R_HALF), A).entries, np.diag([0.625, 0.375]), atol=1e-14)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_alice_tends_to_vacuum_at_large_squeezing(n):
    w = cf.single_party_weights(ModePoint(n, 40.0), A)
    assert w[0] == pytest.approx(1.0, abs=1e-12)
    assert w[1] < 1e-12


@pytest.mark.parametrize("n", [1, 4])
def test_region_iv_vacuum_at_zero_squeezing(n):
    w = cf.single_party_weights(ModePoint(n, 0.0), RB)
    assert w[0] == 1.0 and not np.any(w[1:])


def test_ar_blocks_at_hand_point():
    p = ModePoint(1, R_HALF)
    blocks = cf.pt_blocks_AR(p)
    assert len(blocks.blocks) == 3
    assert blocks.provenance == ("AR_2x2", "singleton", "singleton")
    assert blocks.block_bases[0] == ((0, 1), (1, 0))
    vals = np.linalg.eigvalsh(blocks.blocks[0])
    assert vals[0] == pytest.approx(-0.375, abs=1e-14)
    # (1/(2 C^2 c^2)) (t^2 - sqrt(t^4 + 4/c^2)) with t = 1/2, c^2 = 4/3
    assert 1 / (2 * 1.5 * 4 / 3) * (0.25 - math.sqrt(0.0625 + 3)) == pytest.approx(-0.375, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 5, 20])
def test_ar_spectrum_at_zero_squeezing(n):
    s = cf.spectrum_AR_pt(ModePoint(n, 0.0)).values
    neg = s[s < -1e-15]
    assert list(neg) == [-0.5]
    assert len(s) == 2 * n + 2
    assert len(cf.pt_blocks_AR(ModePoint(n, 0.0)).blocks) == n + 2


@pytest.mark.parametrize("n, r", [(2, 0.8), (5, 1.9), (15, 4.0)])
def test_ar_spectrum_closed_vs_blocks(n, r):
    p = ModePoint(n, r)
    assert np.max(np.abs(cf.spectrum_AR_pt(p).values - cf.pt_blocks_AR(p).eigenvalues())) < 1e-11


@pytest.mark.parametrize("n, r", [(1, 0.4), (3, 1.4), (8, 2.5)])
def test_ar_minus_is_stable_small_root(n, r):
    p = ModePoint(n, r)
    plus, minus = cf.ar_pt_pairs(p)
    for k, b in enumerate(cf.pt_blocks_AR(p).blocks[:n]):
        assert plus[k] * minus[k] == pytest.approx(np.linalg.det(b), rel=1e-10)
        assert plus[k] + minus[k] == pytest.approx(np.trace(b), rel=1e-12)
        assert minus[k] < 0


def test_ar_minus_keeps_relative_accuracy_at_large_squeezing():
    import mpmath

    mpmath.mp.dps = 80
    n, r = 3, 12.0
    _, minus = cf.ar_pt_pairs(ModePoint(n, r))
    t, e = mpmath.tanh(mpmath.mpf(r)), mpmath.sech(mpmath.mpf(r)) ** 2
    c2 = 2 - t ** (2 * n) * (t**2 + 1 + n * e)
    for k in range(n):
        top, corner = t ** (2 * k + 2) * e / c2, (k * t ** (2 * k - 2) * e**2 / c2 if k else 0)
        off2 = (k + 1) * t ** (4 * k) * e**3 / c2**2
        ref = (top + corner) / 2 - mpmath.sqrt(((top - corner) / 2) ** 2 + off2)
        assert minus[k] == pytest.approx(float(ref), rel=1e-12)


def test_arbar_product_state_at_zero_squeezing():
    s = cf.pt_blocks_ARbar(ModePoint(1, 0.0)).eigenvalues()
    assert np.allclose(s, [0.0, 0.0, 0.5, 0.5], atol=1e-15)


@pytest.mark.parametrize("n, r", [(3, 1.4), (1, R_HALF), (6, 0.25)])
def test_arbar_spectrum_matches_oracle(n, r):
    p = ModePoint(n, r)
    ref = numeric_spectrum(oracle_pt(p, "ARbar")).values
    assert np.max(np.abs(cf.pt_blocks_ARbar(p).eigenvalues() - ref)) < 1e-11


@pytest.mark.parametrize("n, r", [(1, 0.55), (3, 1.4), (7, 3.0), (5, 0.0)])
def test_arbar_pairs_match_blocks(n, r):
    p = ModePoint(n, r)
    plus, minus = cf.arbar_pt_pairs(p)
    blocks = cf.pt_blocks_ARbar(p)
    singles = [b[0, 0] for b in blocks.blocks[n:]]
    assert np.max(np.abs(np.sort(np.concatenate([plus, minus, singles])) - blocks.eigenvalues())) < 1e-15


@pytest.mark.parametrize("n, r", [(1, R_HALF), (2, 1.1), (4, 2.0), (6, 0.75)])
def test_uniform_corner_arbar_blocks_agree_except_the_last(n, r):
    # the uniform pattern matches the oracle except at k = N-1: |1,N> is absent from
    # the state, so that corner is 0 rather than (N+1) tanh^2/cosh^2
    p = ModePoint(n, r)
    ref = oracle_pt(p, "ARbar")
    for k in range(n):
        idx = [ref.index((0, k)), ref.index((1, k + 1))]
        block = ref.entries[np.ix_(idx, idx)]
        uniform = uniform_corner_arbar_block(p, k)
        if k < n - 1:
            assert np.max(np.abs(block - uniform)) < 1e-14
        else:
            assert abs(block[1, 1]) == 0.0
            assert uniform[1, 1] > 1e-6
            assert np.max(np.abs(block[:, 0] - uniform[:, 0])) < 1e-14


def test_arbar_last_block_is_not_positive():
    for n in (1, 2, 5, 20):
        for r in (0.1, 1.0, 3.0):
            _, minus = cf.arbar_pt_pairs(ModePoint(n, r))
            assert minus[-1] < 0
            assert np.all(minus[:-1] > 0)


def test_rrbar_n4_block_bases():
    bases = cf.pt_blocks_RRbar(ModePoint(4, 1.0)).block_bases
    expected = [
        [(0, 0)],
        [(0, 1), (1, 0)],
        [(0, 2), (2, 0), (1, 1)],
        [(0, 3), (3, 0), (1, 2), (2, 1)],
        [(0, 4), (4, 0), (1, 3), (3, 1), (2, 2)],
        [(1, 4), (4, 1), (2, 3), (3, 2)],
        [(2, 4), (4, 2), (3, 3)],
        [(3, 4), (4, 3)],
        [(4, 4)],
    ]
    assert [list(b) for b in bases] == expected
    tags = cf.pt_blocks_RRbar(ModePoint(4, 1.0)).provenance
    assert tags == ("RRbar_MD",) * 5 + ("RRbar_MprimeD",) * 4


def test_rrbar_block_basis_rejects_bad_index():
    with pytest.raises(DomainError):
        cf.rrbar_block_basis(3, 4, True)
    with pytest.raises(DomainError):
        cf.rrbar_block_basis(3, 0, False)


def test_rrbar_m2_at_hand_point():
    blocks = cf.pt_blocks_RRbar(ModePoint(1, R_HALF))
    m2 = blocks.blocks[1]
    assert blocks.block_bases[1] == ((0, 1), (1, 0))
    assert np.allclose(m2, [[0.0, 0.25], [0.25, 0.375]], atol=1e-15)
    a1, a2 = 0.25, 0.375
    assert np.linalg.eigvalsh(m2)[0] == pytest.approx((a2 - math.sqrt(a2**2 + 4 * a1**2)) / 2, abs=1e-15)
    assert np.linalg.eigvalsh(m2)[0] == pytest.approx(-0.125, abs=1e-15)


@pytest.mark.parametrize("n", [2, 5])
def test_rrbar_blocks_are_chains(n):
    for b in cf.pt_blocks_RRbar(ModePoint(n, 1.3)).blocks:
        d = len(b)
        mask = np.zeros_like(b, dtype=bool)
        for i in range(d - 1):
            mask[i, i + 1] = mask[i + 1, i] = True
        mask[d - 1, d - 1] = True
        assert not np.any(b[~mask])


@pytest.mark.parametrize("n, r", [(1, R_HALF), (3, 0.5), (6, 2.0)])
def test_block_spectrum_certificate(n, r):
    s = cf.pt_blocks_RRbar(ModePoint(n, r)).spectrum()
    assert s.residual < 1e-14
    assert len(s) == (n + 1) ** 2


def test_rrbar_spectrum_at_hand_point():
    s = cf.spectrum_rho(ModePoint(1, R_HALF), "RRbar").values
    assert np.allclose(np.sort(s)[::-1][:3], [0.625, 0.375, 0.0], atol=1e-14)
    assert len(s) == 4


def test_arbar_rho_spectrum_finite_at_zero_squeezing():
    s = cf.rho_nonzero_eigenvalues(ModePoint(3, 0.0), "ARbar")
    assert np.all(np.isfinite(s))
    assert s[0] == pytest.approx(0.5)
    tiny = cf.rho_nonzero_eigenvalues(ModePoint(3, 1e-9), "ARbar")
    assert np.max(np.abs(tiny - s)) < 1e-8


@pytest.mark.parametrize("n, r", [(1, 0.0), (2, 1.0), (7, 2.2), (40, 5.0)])
def test_spectra_sum_to_one(n, r):
    p = ModePoint(n, r)
    for name in cf.BIPARTITIONS:
        assert np.sum(cf.spectrum_rho(p, name).values) == pytest.approx(1.0, abs=1e-12)
    for party in PARTY_ORDER:
        assert np.sum(cf.single_party_weights(p, party)) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(min_value=1, max_value=200), st.floats(min_value=0.0, max_value=40.0))
def test_property_complementary_eigenvalues(n, r):
    p = ModePoint(n, r)
    pairs = (("AR", RB), ("ARbar", R), ("RRbar", A))
    for bip, party in pairs:
        a = np.sort(cf.rho_nonzero_eigenvalues(p, bip))
        b = np.sort(cf.single_party_weights(p, party))
        assert np.max(np.abs(a - b)) < 1e-14


@given(st.integers(min_value=1, max_value=6), st.floats(min_value=0.0, max_value=4.0))
def test_property_blocks_match_oracle(n, r):
    p = ModePoint(n, r)
    for name in cf.BIPARTITIONS:
        assert np.max(np.abs(cf.pt_blocks(p, name).assemble().entries - oracle_pt(p, name).entries)) < 1e-12


def test_block_set_rejects_overlap():
    blk = np.eye(1)
    bs = cf.BlockSet((A, R), (1, 2), (blk, blk), (((0, 0),), ((0, 0),)), ("singleton", "singleton"))
    with pytest.raises(DomainError):
        bs.assemble()
    with pytest.raises(DomainError):
        cf.BlockSet((A, R), (1, 2), (blk,), (((0, 0),),), ("singleton",))


def test_parse_bipartition():
    assert cf.parse_bipartition("AR") == "AR"
    with pytest.raises(DomainError):
        cf.parse_bipartition("AB")
