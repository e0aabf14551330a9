"""Tabular spectrum and NESS reports (the rows behind the CLI CSVs)."""
from __future__ import annotations

import numpy as np

from . import analytic
from .liouvillian import (
    block_eigenvalues,
    cluster,
    lindbladian,
    mpp_charpoly_roots,
    omega_eigenvalues,
    relaxation_times,
    split_blocks,
)
from .model import ModelParams
from .observables import partial_trace_cursor, von_neumann_entropy

SPECTRUM_HEADER = ("block", "re", "im", "multiplicity", "source")
NESS_HEADER = ("quantity", "j", "k", "re", "im")


def _key(z):
    return (z.real, z.imag)


def spectrum_rows(p: ModelParams) -> list[tuple]:
    blocks = split_blocks(lindbladian(p))
    rows = []
    for name, lam in block_eigenvalues(blocks).items():
        for z in sorted(lam, key=_key):
            rows.append((f"M{name}", z.real, z.imag, 1, "numeric"))
    for mean, size in sorted(cluster(mpp_charpoly_roots(p), 1e-12), key=lambda c: _key(c[0])):
        rows.append(("M++", mean.real, mean.imag, size, "closed-form"))
    om = omega_eigenvalues(p)
    for w in om.omegas:
        rows.append(("omega", w.real, w.imag, 1, "closed-form"))
    for z in om.zetas:
        rows.append(("zeta", z.real, z.imag, 2, "closed-form"))
    rows.append(("omega_degenerate", float(om.degenerate), 0.0, 1, "closed-form"))
    rows.append(("omega_min_gap", om.min_gap, 0.0, 1, "closed-form"))
    if p.epsilon > 0:
        t_reg, t_cur = relaxation_times(p)
        rows.append(("t_register", t_reg, 0.0, 1, "closed-form"))
        rows.append(("t_cursor", t_cur, 0.0, 1, "closed-form"))
    return rows


def ness_rows(p: ModelParams) -> list[tuple]:
    state = analytic.ness(p)
    dense = state.dense()
    rows = [("rho", j, k, v.real, v.imag) for (j, k), v in sorted(state.entries.items())]
    residual = float(np.linalg.norm(lindbladian(p).apply(dense)))
    series = analytic.asymptotic_entropies(p)
    rows += [
        ("S_ness", "", "", state.entropy, 0.0),
        ("S_ness_numeric", "", "", float(von_neumann_entropy(dense)), 0.0),
        ("S_total_series", "", "", series["s_total_series"], 0.0),
        ("S_cursor", "", "", float(von_neumann_entropy(partial_trace_cursor(dense))), 0.0),
        ("S_cursor_series", "", "", series["s_cursor_series"], 0.0),
        ("S_reg_inf", "", "", series["s_reg_inf"], 0.0),
        ("liouvillian_residual", "", "", residual, 0.0),
    ]
    return rows
