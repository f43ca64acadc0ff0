"""FCIDUMP ingestion, active-space folding and the Jordan-Wigner map.

Spin orbitals use BLOCKED ordering throughout: alpha spins occupy indices
0..n-1 and beta spins n..2n-1 for n spatial orbitals.  Two-electron
integrals are stored in chemist notation (pq|rs) exactly as they appear in
the FCIDUMP file; the physicist reordering happens only inside
``build_hamiltonian``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, QubitOperator


class FcidumpError(ValueError):
    """Parse failure; message carries the 1-based line number."""


@dataclass
class FcidumpData:
    n_orb: int
    n_elec: int
    ms2: int
    h1: np.ndarray            # (n_orb, n_orb), Hartree
    h2: np.ndarray            # (n_orb,)*4 chemist (pq|rs), Hartree
    e_core: float
    orbital_energies: np.ndarray | None = None

    def validate_symmetry(self, tol: float = 1e-10) -> None:
        if not np.allclose(self.h1, self.h1.T, atol=tol):
            raise ValueError("h1 is not symmetric")
        g = self.h2
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(g, g.transpose(perm), atol=tol):
                raise ValueError("h2 violates 8-fold permutation symmetry")


@dataclass
class ActiveSpaceSpec:
    n_active_elec: int
    n_active_orb: int
    # either the string "homo-lumo-window" or an explicit 0-based orbital list
    selection: str | list[int] = "homo-lumo-window"

    def __post_init__(self):
        if self.n_active_elec > 2 * self.n_active_orb:
            raise ValueError("more active electrons than spin orbitals")


@dataclass
class FermionOperator:
    """Second-quantized operator: list of (ladder sequence, coefficient).

    A ladder sequence is a tuple of (spin-orbital index, is_creation)
    pairs stored verbatim, so the Jordan-Wigner image is unambiguous.
    """

    n_spin_orb: int
    terms: list[tuple[tuple[tuple[int, bool], ...], complex]] = field(default_factory=list)

    def add(self, ladder, coeff) -> None:
        self.terms.append((tuple((int(i), bool(c)) for i, c in ladder), complex(coeff)))


_HEADER_FIELD = re.compile(r"([A-Za-z0-9]+)\s*=\s*([^=]*?)(?=(?:,?\s*[A-Za-z0-9]+\s*=)|$)")


def parse_fcidump(text: str) -> FcidumpData:
    """Parse the FCIDUMP namelist convention.

    Header: ``&FCI NORB=..,NELEC=..,MS2=..`` terminated by ``&END`` or ``/``.
    Body lines are ``value p q r s`` with 1-based indices; ``p q 0 0`` fills
    h1, ``p 0 0 0`` an orbital energy, ``0 0 0 0`` the core energy.  All
    eight (pq|rs) permutations are reconstructed from each entry.
    """
    lines = text.splitlines()
    header_parts: list[str] = []
    body_start = None
    in_header = False
    for ln, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not in_header:
            if not stripped:
                continue
            if not stripped.upper().startswith("&FCI"):
                raise FcidumpError(f"line {ln}: expected &FCI header, got {stripped[:30]!r}")
            in_header = True
            stripped = stripped[4:]
        end = re.search(r"(&END|/)", stripped, flags=re.IGNORECASE)
        if end:
            header_parts.append(stripped[: end.start()])
            body_start = ln + 1
            break
        header_parts.append(stripped)
    if body_start is None:
        raise FcidumpError("line 1: header never terminated with &END or /")

    fields = {}
    for key, value in _HEADER_FIELD.findall(" ".join(header_parts)):
        fields[key.upper()] = value.strip().rstrip(",")
    try:
        n_orb = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
    except KeyError as missing:
        raise FcidumpError(f"line 1: header missing {missing}") from None
    except ValueError:
        raise FcidumpError("line 1: non-numeric NORB/NELEC") from None
    ms2 = int(fields.get("MS2", "0") or "0")

    h1 = np.zeros((n_orb, n_orb))
    h2 = np.zeros((n_orb,) * 4)
    orbital_energies = np.full(n_orb, np.nan)
    e_core = 0.0

    for ln in range(body_start, len(lines) + 1):
        raw = lines[ln - 1].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 5:
            raise FcidumpError(f"line {ln}: expected 'value p q r s', got {raw!r}")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
        except ValueError:
            raise FcidumpError(f"line {ln}: non-numeric value {parts[0]!r}") from None
        try:
            p, q, r, s = (int(t) for t in parts[1:])
        except ValueError:
            raise FcidumpError(f"line {ln}: non-integer index in {raw!r}") from None
        for idx in (p, q, r, s):
            if idx < 0 or idx > n_orb:
                raise FcidumpError(f"line {ln}: orbital index {idx} out of range 0..{n_orb}")
        if p == 0:
            e_core = value
        elif q == 0:
            orbital_energies[p - 1] = value
        elif r == 0:
            h1[p - 1, q - 1] = value
            h1[q - 1, p - 1] = value
        else:
            i, j, k, l = p - 1, q - 1, r - 1, s - 1
            for a, b, c, d in (
                (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
            ):
                h2[a, b, c, d] = value

    energies = None if np.isnan(orbital_energies).all() else orbital_energies
    return FcidumpData(n_orb, n_elec, ms2, h1, h2, e_core, energies)


def write_fcidump(data: FcidumpData, tol: float = 1e-14) -> str:
    """Inverse of parse_fcidump; emits the 8-fold-unique integrals."""
    n = data.n_orb
    out = [f" &FCI NORB={n},NELEC={data.n_elec},MS2={data.ms2},"]
    out.append("  ORBSYM=" + "1," * n)
    out.append("  ISYM=1,")
    out.append(" &END")
    fmt = " {: .16e} {:4d} {:4d} {:4d} {:4d}"
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    v = data.h2[i, j, k, l]
                    if abs(v) > tol:
                        out.append(fmt.format(v, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            if abs(data.h1[i, j]) > tol:
                out.append(fmt.format(data.h1[i, j], i + 1, j + 1, 0, 0))
    if data.orbital_energies is not None:
        for i, e in enumerate(data.orbital_energies):
            out.append(fmt.format(e, i + 1, 0, 0, 0))
    out.append(fmt.format(data.e_core, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def resolve_active_orbitals(data: FcidumpData, spec: ActiveSpaceSpec) -> tuple[list[int], list[int]]:
    """Return (frozen, active) 0-based spatial orbital lists.

    Orbitals are taken in ascending-energy order (their index order); the
    frozen set is the doubly-occupied orbitals below the window.
    """
    n_frozen_x2 = data.n_elec - spec.n_active_elec
    if n_frozen_x2 < 0:
        raise ValueError("active space names more electrons than the system has")
    if n_frozen_x2 % 2 != 0:
        raise ValueError(
            f"freezing {n_frozen_x2} electrons is not closed-shell; "
            "active electron count is inconsistent with the parent system"
        )
    n_frozen = n_frozen_x2 // 2
    if isinstance(spec.selection, str):
        if spec.selection != "homo-lumo-window":
            raise ValueError(f"unknown selection rule {spec.selection!r}")
        if n_frozen + spec.n_active_orb > data.n_orb:
            raise ValueError("active window exceeds orbital count")
        frozen = list(range(n_frozen))
        active = list(range(n_frozen, n_frozen + spec.n_active_orb))
    else:
        active = sorted(spec.selection)
        if len(active) != spec.n_active_orb:
            raise ValueError("explicit orbital list length != n_active_orb")
        if active and (active[0] < 0 or active[-1] >= data.n_orb):
            raise ValueError("active window exceeds orbital count")
        frozen = [p for p in range(data.n_orb) if p not in active][:n_frozen]
        if len(frozen) != n_frozen:
            raise ValueError("not enough orbitals outside the window to freeze")
    return frozen, active


def fold_active_space(
    data: FcidumpData, spec: ActiveSpaceSpec
) -> tuple[np.ndarray, np.ndarray, float]:
    """Standard closed-shell frozen-core folding.

    The frozen orbitals' mean field is absorbed into the effective
    one-electron integrals and the core energy; virtuals above the window
    are discarded.
    """
    frozen, active = resolve_active_orbitals(data, spec)
    h1, g = data.h1, data.h2

    e_core_eff = data.e_core
    for f in frozen:
        e_core_eff += 2.0 * h1[f, f]
    for f in frozen:
        for fp in frozen:
            e_core_eff += 2.0 * g[f, f, fp, fp] - g[f, fp, fp, f]

    act = np.asarray(active, dtype=int)
    h1_eff = h1[np.ix_(act, act)].copy()
    for f in frozen:
        h1_eff += 2.0 * g[:, :, f, f][np.ix_(act, act)] - g[:, f, f, :][np.ix_(act, act)]

    h2_active = g[np.ix_(act, act, act, act)].copy()
    return h1_eff, h2_active, float(e_core_eff)


def build_hamiltonian(h1_eff: np.ndarray, h2_active: np.ndarray, e_core_eff: float) -> FermionOperator:
    """Second-quantized H over 2n blocked spin orbitals.

    H = E_c + sum_pq h_pq a+_p a_q + 1/2 sum_pqrs (pq|rs) a+_p a+_r a_s a_q
    with each spatial index carrying an alpha and a beta copy.
    """
    n = h1_eff.shape[0]
    op = FermionOperator(2 * n)
    if e_core_eff != 0.0:
        op.add((), e_core_eff)
    for p in range(n):
        for q in range(n):
            v = h1_eff[p, q]
            if abs(v) < 1e-13:
                continue
            for sigma in (0, n):
                op.add(((p + sigma, True), (q + sigma, False)), v)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    v = 0.5 * h2_active[p, q, r, s]
                    if abs(v) < 1e-13:
                        continue
                    for sigma in (0, n):
                        for tau in (0, n):
                            op.add(
                                ((p + sigma, True), (r + tau, True), (s + tau, False), (q + sigma, False)),
                                v,
                            )
    return op


def _ladder_as_qubits(index: int, creation: bool, n_qubits: int) -> QubitOperator:
    # a+_j = (X_j - iY_j)/2 * Z_{j-1}..Z_0 ; a_j gets the +i sign
    z_tail = (1 << index) - 1
    x_part = PauliString(n_qubits, 1 << index, z_tail)
    y_part = PauliString(n_qubits, 1 << index, z_tail | (1 << index))
    sign = -0.5j if creation else 0.5j
    return QubitOperator(n_qubits, {x_part: 0.5, y_part: sign})


def jordan_wigner(op: FermionOperator) -> QubitOperator:
    """Map a FermionOperator to a simplified QubitOperator."""
    n = op.n_spin_orb
    total = QubitOperator.zero(n)
    identity = PauliString.identity(n)
    cache: dict[tuple[int, bool], QubitOperator] = {}
    for ladder, coeff in op.terms:
        if not ladder:
            total.add_term(identity, coeff)
            continue
        product = None
        for index, creation in ladder:
            factor = cache.get((index, creation))
            if factor is None:
                factor = _ladder_as_qubits(index, creation, n)
                cache[(index, creation)] = factor
            product = factor if product is None else product * factor
        for p, c in product.terms.items():
            total.add_term(p, coeff * c)
    return total.simplify()


def hf_reference(n_active_elec: int, n_spin_orb: int) -> int:
    """Occupation bitmask of the Hartree-Fock determinant (blocked order).

    Closed-shell filling; an odd electron count puts the extra electron in
    the alpha block.
    """
    if n_spin_orb % 2 != 0:
        raise ValueError("blocked ordering needs an even spin-orbital count")
    if n_active_elec > n_spin_orb:
        raise ValueError("more electrons than spin orbitals")
    n_spatial = n_spin_orb // 2
    n_alpha = (n_active_elec + 1) // 2
    n_beta = n_active_elec // 2
    if n_alpha > n_spatial:
        raise ValueError("alpha electrons exceed spatial orbitals")
    mask = 0
    for i in range(n_alpha):
        mask |= 1 << i
    for i in range(n_beta):
        mask |= 1 << (n_spatial + i)
    return mask


def determinant_energy(
    h1: np.ndarray, h2: np.ndarray, e_core: float, n_elec: int
) -> float:
    """Energy of the aufbau determinant straight from (folded) integrals.

    Works for even and odd electron counts using the alpha-majority filling
    convention of ``hf_reference``.
    """
    n_alpha = (n_elec + 1) // 2
    n_beta = n_elec // 2
    occ_a = list(range(n_alpha))
    occ_b = list(range(n_beta))
    e = e_core
    for i in occ_a + occ_b:
        e += h1[i, i]
    for spin_i, occ_i in ((0, occ_a), (1, occ_b)):
        for spin_j, occ_j in ((0, occ_a), (1, occ_b)):
            for i in occ_i:
                for j in occ_j:
                    e += 0.5 * h2[i, i, j, j]
                    if spin_i == spin_j:
                        e -= 0.5 * h2[i, j, j, i]
    return float(e)


SIDECAR_KEYS = ("system", "distance_angstrom", "hf_energy_ha", "active_space", "ordering")


def read_sidecar(text: str) -> dict[str, str]:
    """Parse the fixture metadata sidecar (``key = value`` lines)."""
    meta: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed sidecar line {line!r}")
        meta[key.strip()] = value.strip()
    missing = [k for k in SIDECAR_KEYS if k not in meta]
    if missing:
        raise ValueError(f"sidecar missing keys: {', '.join(missing)}")
    return meta
