"""Atomic-valence active-space selection (projector variant).

Occupied and virtual MOs are rotated separately to diagonalize their
overlap with the span of chosen reference AOs; orbitals whose overlap
eigenvalue exceeds the threshold enter the active space.  The reference
functions are columns of the molecular AO basis itself (selected by
label), which keeps the projector free of any extra basis-set data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet


@dataclass
class AvasResult:
    n_active_elec: int
    n_active_orb: int
    rotated_coeff: np.ndarray       # full MO matrix with rotated occ/virt blocks
    active: list[int]               # active column indices in rotated_coeff
    occupied_overlaps: np.ndarray
    virtual_overlaps: np.ndarray
    reference_labels: list[str]


def _reference_columns(basis: BasisSet, patterns: list[str], spherical_dim: int | None) -> list[int]:
    cols = [i for i, lbl in enumerate(basis.labels) if any(p in lbl for p in patterns)]
    if not cols:
        raise ValueError(f"no AO labels match {patterns}")
    return cols


def avas_select(
    s_ao: np.ndarray,
    mo_coeff: np.ndarray,
    n_occ: int,
    basis: BasisSet,
    patterns: list[str],
    threshold: float = 0.2,
) -> AvasResult:
    """Rotate occ/virt blocks against the reference-AO projector.

    ``patterns`` match substrings of the AO labels (e.g. "Mg s", "O p").
    Only usable with cartesian integrals (labels index cartesian AOs).
    """
    ref = _reference_columns(basis, patterns, None)
    s_rr = s_ao[np.ix_(ref, ref)]
    s_ar = s_ao[:, ref]
    projector = s_ar @ np.linalg.solve(s_rr, s_ar.T)

    out_coeff = mo_coeff.copy()
    overlaps = {}
    blocks = {"occ": np.arange(n_occ), "virt": np.arange(n_occ, mo_coeff.shape[1])}
    active_cols: list[int] = []
    for name, cols in blocks.items():
        c = mo_coeff[:, cols]
        m = c.T @ projector @ c
        vals, vecs = np.linalg.eigh(m)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        out_coeff[:, cols] = c @ vecs
        overlaps[name] = vals
        chosen = [int(cols[k]) for k in range(len(cols)) if vals[k] > threshold]
        active_cols.extend(chosen)

    n_active_occ = sum(1 for a in active_cols if a < n_occ)
    return AvasResult(
        n_active_elec=2 * n_active_occ,
        n_active_orb=len(active_cols),
        rotated_coeff=out_coeff,
        active=sorted(active_cols),
        occupied_overlaps=overlaps["occ"],
        virtual_overlaps=overlaps["virt"],
        reference_labels=[basis.labels[i] for i in ref],
    )
