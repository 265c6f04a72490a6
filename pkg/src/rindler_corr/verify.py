"""Oracle-versus-closed-form comparison at a single mode point."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from . import oracle
from .measures import MEASURE_FIELDS, CorrelationPoint, correlation_point, entropy, negativity
from .oracle import Party
from .params import ModePoint

TOLERANCE = 1e-10


def _point(p) -> ModePoint:
    return p if isinstance(p, ModePoint) else ModePoint(*p)


def oracle_matrices(p: ModePoint) -> dict:
    """Every reduction of the dense state, keyed like :data:`MATRIX_NAMES`."""
    state = oracle.build_tripartite_state(_point(p))
    out = {name: oracle.partial_trace(state, parties) for name, parties in cf.BIPARTITIONS.items()}
    for party in oracle.PARTY_ORDER:
        out[party.value] = oracle.partial_trace(state, [party])
    return out


def oracle_correlation_point(p: ModePoint) -> CorrelationPoint:
    """Every measure computed from dense reductions and Jacobi spectra only."""
    p = _point(p)
    mats = oracle_matrices(p)
    spec = {k: oracle.numeric_spectrum(m) for k, m in mats.items()}
    s = {k: entropy(np.clip(v.values, 0.0, None)) for k, v in spec.items()}
    negs = {
        k: negativity(oracle.numeric_spectrum(oracle.partial_transpose(mats[k], cf.TRANSPOSED[k])))
        for k in cf.BIPARTITIONS
    }
    s_a, s_r, s_rbar = s["A"], s["R"], s["Rbar"]
    i_ar = s_a + s_r - s["AR"]
    i_arbar = s_a + s_rbar - s["ARbar"]
    return CorrelationPoint(
        n_max=p.n_max,
        r=p.r,
        neg_AR=negs["AR"],
        neg_ARbar=negs["ARbar"],
        neg_RRbar=negs["RRbar"],
        S_A=s_a,
        S_R=s_r,
        S_Rbar=s_rbar,
        S_AR=s["AR"],
        S_ARbar=s["ARbar"],
        S_RRbar=s["RRbar"],
        I_AR=i_ar,
        I_ARbar=i_arbar,
        I_RRbar=s_r + s_rbar - s["RRbar"],
        deviation=2.0 - (i_ar + i_arbar),
    )


def _closed_matrix(p, name):
    if name in cf.BIPARTITIONS:
        return cf.rho_bipartite(p, name)
    return cf.rho_single(p, name)


def _labels_match(a, b) -> bool:
    return a.parties == b.parties and a.dims == b.dims and a.basis_order == b.basis_order


@dataclass
class VerificationReport:
    """Max absolute discrepancies, grouped by matrices, spectra and measures."""

    point: ModePoint
    matrices: dict = field(default_factory=dict)
    spectra: dict = field(default_factory=dict)
    measures: dict = field(default_factory=dict)
    tolerance: float = TOLERANCE

    def items(self):
        for group in ("matrices", "spectra", "measures"):
            for name, value in getattr(self, group).items():
                yield group, name, value

    @property
    def max_discrepancy(self) -> float:
        return max((v for _, _, v in self.items()), default=0.0)

    @property
    def passed(self) -> bool:
        return all(v < self.tolerance for _, _, v in self.items())

    def failures(self):
        return [(g, n, v) for g, n, v in self.items() if not v < self.tolerance]


def verify_point(p: ModePoint, tolerance: float = TOLERANCE) -> VerificationReport:
    """Compare every closed-form object with its oracle counterpart at ``p``.

    Matrices entrywise (after checking basis labels), spectra as sorted
    multisets, measures as scalars.  Label mismatches count as infinite
    discrepancy.
    """
    p = _point(p)
    report = VerificationReport(p, tolerance=tolerance)
    mats = oracle_matrices(p)
    for name, ref in mats.items():
        mine = _closed_matrix(p, name)
        if not _labels_match(mine, ref):
            report.matrices[f"rho_{name}"] = float("inf")
            continue
        report.matrices[f"rho_{name}"] = float(np.max(np.abs(mine.entries - ref.entries)))

    for name in cf.BIPARTITIONS:
        pt_ref = oracle.partial_transpose(mats[name], cf.TRANSPOSED[name])
        blocks = cf.pt_blocks(p, name)
        assembled = blocks.assemble()
        report.matrices[f"pt_{name}"] = (
            float(np.max(np.abs(assembled.entries - pt_ref.entries)))
            if _labels_match(assembled, pt_ref)
            else float("inf")
        )
        ref_vals = oracle.numeric_spectrum(pt_ref).values
        report.spectra[f"pt_{name}_blocks"] = float(np.max(np.abs(blocks.eigenvalues() - ref_vals)))
        rho_vals = oracle.numeric_spectrum(mats[name]).values
        report.spectra[f"rho_{name}"] = float(np.max(np.abs(cf.spectrum_rho(p, name).values - rho_vals)))
    ar_ref = oracle.numeric_spectrum(oracle.partial_transpose(mats["AR"], Party.ALICE)).values
    report.spectra["pt_AR_closed"] = float(np.max(np.abs(cf.spectrum_AR_pt(p).values - ar_ref)))

    closed, ref = correlation_point(p), oracle_correlation_point(p)
    for name in MEASURE_FIELDS:
        report.measures[name] = abs(getattr(closed, name) - getattr(ref, name))
    return report
