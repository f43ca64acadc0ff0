"""Classical reference surfaces (HF and B3LYP) in the shared results-table format."""

from __future__ import annotations

import time

import numpy as np

from .basis import build_basis
from .dft import rks_b3lyp
from .export import run_scf_with_fallbacks
from .geometry import ion_molecule_geometry
from .scf import compute_integrals

RESULTS_HEADER = "distance_angstrom energy_ha stderr_ha method iterations evaluations wall_time_s"


def results_table(rows: list[dict]) -> str:
    lines = [RESULTS_HEADER]
    for r in rows:
        lines.append(
            f"{r['distance']:.4f} {r['energy']:.10f} {r['stderr']:.10f} "
            f"{r['method']} {r['iterations']} {r['evaluations']} {r['wall_time']:.3f}"
        )
    return "\n".join(lines) + "\n"


def reference_pes(
    molecule: str, method: str, distances: list[float], log: list[str] | None = None
) -> list[dict]:
    """Total RHF or RKS-B3LYP energies for the ion-molecule scan."""
    rows = []
    for d in distances:
        t0 = time.perf_counter()
        atoms = ion_molecule_geometry(molecule, d)
        basis = build_basis(atoms, "6-31g*")
        ints = compute_integrals(basis, spherical=False)  # Pople convention: 6 cartesian d
        n_elec = int(basis.atom_charges.sum()) - 2
        if method == "hf":
            scf = run_scf_with_fallbacks(ints, n_elec)
        elif method == "dft":
            scf = rks_b3lyp(ints, basis, n_elec)
        else:
            raise ValueError(f"unknown reference method {method!r}")
        wall = time.perf_counter() - t0
        note = f"{molecule} {method} d={d:.2f}: E={scf.energy:.10f} conv={scf.converged} ({wall:.1f}s)"
        if log is not None:
            log.append(note)
        if not scf.converged:
            continue
        rows.append(
            dict(distance=d, energy=scf.energy, stderr=0.0, method=method,
                 iterations=scf.n_iter, evaluations=scf.n_iter, wall_time=wall)
        )
    return rows
