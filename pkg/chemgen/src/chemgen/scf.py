"""Restricted Hartree-Fock with DIIS, plus MO-basis integral transforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, nuclear_repulsion
from .integrals import electron_repulsion, nuclear_attraction, overlap_kinetic, transform_spherical


@dataclass
class IntegralSet:
    s: np.ndarray
    hcore: np.ndarray
    g: np.ndarray          # chemist (pq|rs)
    e_nuc: float
    n_ao: int


def compute_integrals(basis: BasisSet, spherical: bool = True) -> IntegralSet:
    s, t = overlap_kinetic(basis)
    v = nuclear_attraction(basis)
    g = electron_repulsion(basis)
    if spherical:
        s, t, v, g = transform_spherical(basis, s, t, v, g)
    return IntegralSet(s=s, hcore=t + v, g=g, e_nuc=nuclear_repulsion(basis), n_ao=s.shape[0])


@dataclass
class SCFResult:
    energy: float               # total, Hartree
    e_nuc: float
    mo_energies: np.ndarray
    mo_coeff: np.ndarray        # columns are MOs in the AO basis
    density: np.ndarray
    converged: bool
    n_iter: int
    n_occ: int


def _orthogonalizer(s: np.ndarray, lin_dep_tol: float = 1e-7) -> np.ndarray:
    evals, vecs = np.linalg.eigh(s)
    keep = evals > lin_dep_tol
    return vecs[:, keep] / np.sqrt(evals[keep])


class _DIIS:
    def __init__(self, max_vectors: int = 8):
        self.errors: list[np.ndarray] = []
        self.focks: list[np.ndarray] = []
        self.max_vectors = max_vectors

    def update(self, fock: np.ndarray, error: np.ndarray) -> np.ndarray:
        self.errors.append(error.ravel())
        self.focks.append(fock.copy())
        if len(self.errors) > self.max_vectors:
            self.errors.pop(0)
            self.focks.pop(0)
        m = len(self.errors)
        if m < 2:
            return fock
        b = -np.ones((m + 1, m + 1))
        b[m, m] = 0.0
        for i in range(m):
            for j in range(m):
                b[i, j] = float(np.dot(self.errors[i], self.errors[j]))
        rhs = np.zeros(m + 1)
        rhs[m] = -1.0
        try:
            coeffs = np.linalg.solve(b, rhs)[:m]
        except np.linalg.LinAlgError:
            return fock
        return sum(c * f for c, f in zip(coeffs, self.focks))


def rhf(
    integrals: IntegralSet,
    n_elec: int,
    max_cycles: int = 200,
    conv_tol: float = 1e-10,
    level_shift: float = 0.0,
    fock_builder=None,
) -> SCFResult:
    """Closed-shell SCF.  ``fock_builder(density) -> (fock, e_elec)`` lets the
    Kohn-Sham driver reuse the same loop with an XC contribution."""
    if n_elec % 2 != 0:
        raise ValueError("rhf requires an even electron count")
    n_occ = n_elec // 2
    s, h, g = integrals.s, integrals.hcore, integrals.g
    x = _orthogonalizer(s)

    def default_builder(d):
        j = np.einsum("pqrs,rs->pq", g, d, optimize=True)
        k = np.einsum("prqs,rs->pq", g, d, optimize=True)
        f = h + j - 0.5 * k
        e_elec = 0.5 * float(np.sum(d * (h + f)))
        return f, e_elec

    builder = fock_builder or default_builder

    # core-Hamiltonian guess
    fp = x.T @ h @ x
    evals, evecs = np.linalg.eigh(fp)
    c = x @ evecs
    d = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T

    diis = _DIIS()
    energy = 0.0
    converged = False
    cycle = 0
    for cycle in range(1, max_cycles + 1):
        f, e_elec = builder(d)
        new_energy = e_elec + integrals.e_nuc
        error = f @ d @ s - s @ d @ f
        error = x.T @ error @ x
        f_eff = diis.update(f, error)
        if level_shift > 0.0:
            f_eff = f_eff + level_shift * (s - 0.5 * s @ d @ s)
        fp = x.T @ f_eff @ x
        evals, evecs = np.linalg.eigh(fp)
        c = x @ evecs
        d_new = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        err_norm = float(np.max(np.abs(error)))
        if abs(new_energy - energy) < conv_tol and err_norm < 1e-6:
            energy = new_energy
            converged = True
            d = d_new
            break
        energy = new_energy
        d = d_new

    # final canonical MOs from the unshifted Fock
    f, e_elec = builder(d)
    fp = x.T @ f @ x
    evals, evecs = np.linalg.eigh(fp)
    c = x @ evecs
    energy = e_elec + integrals.e_nuc

    return SCFResult(
        energy=float(energy),
        e_nuc=integrals.e_nuc,
        mo_energies=evals,
        mo_coeff=c,
        density=d,
        converged=converged,
        n_iter=cycle,
        n_occ=n_occ,
    )


def mo_integrals(integrals: IntegralSet, mo_coeff: np.ndarray):
    """Transform hcore and the ERI tensor to the MO basis (chemist order)."""
    c = mo_coeff
    h_mo = c.T @ integrals.hcore @ c
    g_mo = np.einsum("pi,pqrs->iqrs", c, integrals.g, optimize=True)
    g_mo = np.einsum("qj,iqrs->ijrs", c, g_mo, optimize=True)
    g_mo = np.einsum("rk,ijrs->ijks", c, g_mo, optimize=True)
    g_mo = np.einsum("sl,ijks->ijkl", c, g_mo, optimize=True)
    return h_mo, g_mo
