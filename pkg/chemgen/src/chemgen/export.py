"""Active-space folding and FCIDUMP + metadata export.

The FCIDUMP files carry the physically meaningful core constant
(nuclear repulsion plus the folded frozen-core energy), so summing the
active eigenvalue and the core constant gives the total energy that the
potential-energy-surface fits consume.  The sidecar additionally records
the bare nuclear repulsion so downstream tools can report the
active-space electronic energy relative to it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import build_basis
from .geometry import geometry_description, h2_geometry, ion_molecule_geometry
from .scf import IntegralSet, SCFResult, compute_integrals, mo_integrals, rhf


@dataclass
class FoldedSpace:
    h_eff: np.ndarray
    g_act: np.ndarray
    e_core_eff: float
    frozen: list[int]
    active: list[int]
    n_active_elec: int


def fold_window(
    h_mo: np.ndarray, g_mo: np.ndarray, e_nuc: float, n_elec: int,
    n_active_elec: int, active: list[int],
) -> FoldedSpace:
    """Freeze the doubly occupied orbitals outside the active list."""
    n_frozen_x2 = n_elec - n_active_elec
    if n_frozen_x2 < 0 or n_frozen_x2 % 2 != 0:
        raise ValueError("active electron count incompatible with closed-shell folding")
    n_frozen = n_frozen_x2 // 2
    frozen = [p for p in range(h_mo.shape[0]) if p not in active][:n_frozen]
    if len(frozen) != n_frozen:
        raise ValueError("not enough orbitals outside the window to freeze")
    e_core = e_nuc + 2.0 * sum(h_mo[f, f] for f in frozen)
    for f in frozen:
        for fp in frozen:
            e_core += 2.0 * g_mo[f, f, fp, fp] - g_mo[f, fp, fp, f]
    act = np.asarray(active)
    h_eff = h_mo[np.ix_(act, act)].copy()
    for f in frozen:
        h_eff += 2.0 * g_mo[:, :, f, f][np.ix_(act, act)] - g_mo[:, f, f, :][np.ix_(act, act)]
    g_act = g_mo[np.ix_(act, act, act, act)].copy()
    return FoldedSpace(h_eff, g_act, float(e_core), frozen, list(active), n_active_elec)


def homo_lumo_window(n_elec: int, n_active_elec: int, n_active_orb: int) -> list[int]:
    n_frozen = (n_elec - n_active_elec) // 2
    return list(range(n_frozen, n_frozen + n_active_orb))


def write_fcidump_text(h1: np.ndarray, g: np.ndarray, e_core: float, n_elec: int,
                       orbital_energies: np.ndarray | None = None, tol: float = 1e-14) -> str:
    n = h1.shape[0]
    lines = [f" &FCI NORB={n},NELEC={n_elec},MS2=0,"]
    lines.append("  ORBSYM=" + "1," * n)
    lines.append("  ISYM=1,")
    lines.append(" &END")
    fmt = " {: .16e} {:4d} {:4d} {:4d} {:4d}"
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    v = g[i, j, k, l]
                    if abs(v) > tol:
                        lines.append(fmt.format(v, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            if abs(h1[i, j]) > tol:
                lines.append(fmt.format(h1[i, j], i + 1, j + 1, 0, 0))
    if orbital_energies is not None:
        for i, e in enumerate(orbital_energies):
            lines.append(fmt.format(e, i + 1, 0, 0, 0))
    lines.append(fmt.format(e_core, 0, 0, 0, 0))
    return "\n".join(lines) + "\n"


def sidecar_text(
    system: str, distance: float, hf_energy: float, active_space: str,
    orbital_energies: np.ndarray, e_nuc: float, basis: str, n_frozen: int,
) -> str:
    energies = ",".join(f"{e:.10f}" for e in orbital_energies)
    return (
        f"system = {system}\n"
        f"distance_angstrom = {distance:.4f}\n"
        f"hf_energy_ha = {hf_energy:.10f}\n"
        f"active_space = {active_space}\n"
        f"ordering = blocked-alpha-beta\n"
        f"orbital_energies_ha = {energies}\n"
        f"nuclear_repulsion_ha = {e_nuc:.10f}\n"
        f"basis = {basis}\n"
        f"n_frozen = {n_frozen}\n"
    )


@dataclass
class FixtureRecord:
    system: str
    distance: float
    fcidump: str
    sidecar: str
    hf_energy: float
    converged: bool
    log_lines: list[str]


def run_scf_with_fallbacks(ints: IntegralSet, n_elec: int) -> SCFResult:
    """Plain SCF first, then level-shifted retries for stiff geometries."""
    result = rhf(ints, n_elec)
    if result.converged:
        return result
    for shift in (0.3, 1.0, 3.0):
        result = rhf(ints, n_elec, max_cycles=400, level_shift=shift)
        if result.converged:
            return result
    return result


def make_fixture(
    system: str, distance: float, active_space: tuple[int, int] | None,
    basis_name: str | None = None,
) -> FixtureRecord:
    """Build one FCIDUMP + sidecar pair for a scan point.

    ``system`` is "H2" or "Mg+<molecule>" (e.g. "Mg+H2O").  The H2 system
    exports the full space; the ion systems fold to the requested
    (electrons, orbitals) HOMO-LUMO window.
    """
    log: list[str] = []
    if system == "H2":
        atoms = h2_geometry(distance)
        basis_name = basis_name or "sto-3g"
        n_elec = 2
        charge_note = "charge 0, singlet"
    elif system in ("H2O", "N2", "CO2"):
        # neutral monomer (no ion); distance is ignored for the geometry
        atoms = ion_molecule_geometry(system, 1.0)[:-1]
        basis_name = basis_name or "6-31g*"
        n_elec = int(sum({"H": 1, "C": 6, "N": 7, "O": 8}[el] for el, _ in atoms))
        charge_note = "charge 0, singlet"
        log.append(geometry_description(system))
    else:
        ion, _, molecule = system.partition("+")
        atoms = ion_molecule_geometry(molecule, distance, ion=ion)
        basis_name = basis_name or "6-31g*"
        n_elec = int(sum({"H": 1, "C": 6, "N": 7, "O": 8, "Mg": 12}[el] for el, _ in atoms)) - 2
        charge_note = "charge +2, singlet"
        log.append(geometry_description(molecule))
    basis = build_basis(atoms, basis_name)
    ints = compute_integrals(basis, spherical=False)  # Pople convention: 6 cartesian d
    scf = run_scf_with_fallbacks(ints, n_elec)
    log.append(
        f"{system} d={distance:.2f}: basis={basis_name} ({ints.n_ao} AOs, cartesian d), "
        f"{charge_note}, SCF {'converged' if scf.converged else 'FAILED'} "
        f"in {scf.n_iter} cycles, E = {scf.energy:.10f} Ha"
    )
    if not scf.converged:
        return FixtureRecord(system, distance, "", "", scf.energy, False, log)
    h_mo, g_mo = mo_integrals(ints, scf.mo_coeff)
    if active_space is None:
        ne_act, active = n_elec, list(range(ints.n_ao))
        folded = FoldedSpace(h_mo, g_mo, ints.e_nuc, [], active, ne_act)
        space_tag = f"{n_elec},{ints.n_ao}"
    else:
        ne_act, no_act = active_space
        active = homo_lumo_window(n_elec, ne_act, no_act)
        folded = fold_window(h_mo, g_mo, ints.e_nuc, n_elec, ne_act, active)
        space_tag = f"{ne_act},{no_act}"
        log.append(
            f"  active window (HOMO-LUMO, ascending orbital energy): MOs {active}, "
            f"frozen {folded.frozen}, e_core_eff = {folded.e_core_eff:.10f}"
        )
    window_energies = scf.mo_energies[np.asarray(folded.active)]
    fcidump = write_fcidump_text(folded.h_eff, folded.g_act, folded.e_core_eff,
                                 folded.n_active_elec, window_energies)
    sidecar = sidecar_text(system, distance, scf.energy, space_tag,
                           window_energies, ints.e_nuc, basis_name, len(folded.frozen))
    return FixtureRecord(system, distance, fcidump, sidecar, scf.energy, True, log)
