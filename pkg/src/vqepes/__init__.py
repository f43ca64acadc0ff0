"""VQE toolkit for ion-molecule potential energy surfaces.

Ingests FCIDUMP integrals, builds Jordan-Wigner qubit Hamiltonians, runs
UCCSD / RyRz / qubit-ADAPT VQE on a dense statevector simulator, benchmarks
against exact diagonalization, sweeps separations into potential energy
surfaces and fits Morse potentials to extract equilibrium distances and
binding energies.
"""

__version__ = "0.1.0"
