"""Gaussian basis-set data and molecular basis construction.

Embedded sets: STO-3G (H only, for the desk-scale H2 fixtures) and
6-31G / 6-31G* for H, C, N, O, Mg.  SP shells from the Pople sets are
expanded into separate s and p shells sharing exponents.  Cartesian
components follow the xx, xy, xz, yy, yz, zz order; d shells can be
contracted to the 5 spherical components at integral-transformation time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.52917721092

# (element, set) -> list of (l, [(exponent, coefficient), ...])
# SP entries appear as consecutive l=0 and l=1 shells with shared exponents.

_STO3G = {
    "H": [
        (0, [(3.425250914, 0.1543289673), (0.6239137298, 0.5353281423), (0.1688554040, 0.4446345422)]),
    ],
}

_631G_H = [
    (0, [(18.73113696, 0.03349460434), (2.825394365, 0.2347269535), (0.6401216923, 0.8137573261)]),
    (0, [(0.1612777588, 1.0)]),
]

_631G_C = [
    (0, [(3047.524880, 0.001834737132), (457.3695180, 0.01403732281), (103.9486850, 0.06884262226),
         (29.21015530, 0.2321844432), (9.286662960, 0.4679413484), (3.163926960, 0.3623119853)]),
    (0, [(7.868272350, -0.1193324198), (1.881288540, -0.1608541517), (0.5442492580, 1.143456438)]),
    (1, [(7.868272350, 0.06899906659), (1.881288540, 0.3164239610), (0.5442492580, 0.7443082909)]),
    (0, [(0.1687144782, 1.0)]),
    (1, [(0.1687144782, 1.0)]),
]

_631G_N = [
    (0, [(4173.511460, 0.001834772160), (627.4579110, 0.01399462700), (142.9020930, 0.06858655181),
         (40.23432930, 0.2322408730), (12.82021290, 0.4690699481), (4.390437010, 0.3604551991)]),
    (0, [(11.62636186, -0.1149611817), (2.716279807, -0.1691174786), (0.7722183966, 1.145851947)]),
    (1, [(11.62636186, 0.06757974388), (2.716279807, 0.3239072959), (0.7722183966, 0.7408951398)]),
    (0, [(0.2120314975, 1.0)]),
    (1, [(0.2120314975, 1.0)]),
]

_631G_O = [
    (0, [(5484.671660, 0.001831074430), (825.2349460, 0.01395017220), (188.0469580, 0.06844507810),
         (52.96450000, 0.2327143360), (16.89757040, 0.4701928980), (5.799635340, 0.3585208530)]),
    (0, [(15.53961625, -0.1107775495), (3.599933586, -0.1480262627), (1.013761750, 1.130767015)]),
    (1, [(15.53961625, 0.07087426823), (3.599933586, 0.3397528391), (1.013761750, 0.7271585773)]),
    (0, [(0.2700058226, 1.0)]),
    (1, [(0.2700058226, 1.0)]),
]

_631G_MG = [
    (0, [(11722.80000, 0.001977829317), (1759.930000, 0.01511399478), (400.8460000, 0.07391077448),
         (112.8070000, 0.2491909140), (35.99970000, 0.4879278316), (12.18280000, 0.3196618896)]),
    (0, [(189.1800000, -0.003237170471), (45.21190000, -0.04100790597), (14.35630000, -0.1126000164),
         (5.138860000, 0.1486330004), (1.906520000, 0.6164970898), (0.7058870000, 0.3648290213)]),
    (1, [(189.1800000, 0.004928129921), (45.21190000, 0.03498879944), (14.35630000, 0.1407249977),
         (5.138860000, 0.3336419961), (1.906520000, 0.4449399933), (0.7058870000, 0.2692540159)]),
    (0, [(0.9293400000, -0.2122908985), (0.2690350000, -0.1079854570), (0.1173790000, 1.175844977)]),
    (1, [(0.9293400000, -0.02241918123), (0.2690350000, 0.1922708390), (0.1173790000, 0.8461802916)]),
    (0, [(0.04210610000, 1.0)]),
    (1, [(0.04210610000, 1.0)]),
]

# polarization d exponents for 6-31G*
_POLARIZATION_D = {"C": 0.8, "N": 0.8, "O": 0.8, "Mg": 0.175}

_631G = {"H": _631G_H, "C": _631G_C, "N": _631G_N, "O": _631G_O, "Mg": _631G_MG}

ATOMIC_NUMBER = {"H": 1, "C": 6, "N": 7, "O": 8, "Mg": 12}


def shells_for(element: str, basis: str) -> list[tuple[int, list[tuple[float, float]]]]:
    basis = basis.lower()
    if basis == "sto-3g":
        table = _STO3G
        if element not in table:
            raise ValueError(f"no STO-3G data embedded for {element}")
        return list(table[element])
    if basis in ("6-31g", "6-31g*"):
        if element not in _631G:
            raise ValueError(f"no 6-31G data embedded for {element}")
        shells = list(_631G[element])
        if basis == "6-31g*" and element in _POLARIZATION_D:
            shells = shells + [(2, [(_POLARIZATION_D[element], 1.0)])]
        return shells
    raise ValueError(f"unknown basis {basis!r}")


CART_COMPONENTS = {
    0: [(0, 0, 0)],
    1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
    2: [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)],
}


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def primitive_norm(alpha: float, lmn: tuple[int, int, int]) -> float:
    l, m, n = lmn
    L = l + m + n
    num = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** (L / 2.0)
    den = np.sqrt(_double_factorial(2 * l - 1) * _double_factorial(2 * m - 1) * _double_factorial(2 * n - 1))
    return num / den


@dataclass
class BasisSet:
    """Flattened per-shell arrays, numba-friendly."""

    shell_l: np.ndarray          # (n_shell,)
    shell_center: np.ndarray     # (n_shell, 3) bohr
    shell_atom: np.ndarray       # (n_shell,) atom index
    prim_start: np.ndarray       # (n_shell,)
    prim_count: np.ndarray       # (n_shell,)
    prim_exp: np.ndarray         # (n_prim,)
    prim_coef: np.ndarray        # (n_prim,) includes primitive axial norms
    shell_offset: np.ndarray     # (n_shell,) first cartesian AO index
    n_cart: int
    atom_coords: np.ndarray      # (n_atom, 3) bohr
    atom_charges: np.ndarray     # (n_atom,)
    labels: list[str]            # per cartesian AO, e.g. "0 Mg 3s"

    def cart_to_spherical(self) -> np.ndarray:
        """Block matrix C (n_cart x n_ao) dropping each d shell's trace
        component; s and p blocks are identity.  Only the span matters for
        the SCF, so integer solid-harmonic combinations suffice."""
        blocks = []
        for l in self.shell_l:
            if l == 0:
                blocks.append(np.eye(1))
            elif l == 1:
                blocks.append(np.eye(3))
            elif l == 2:
                # rows: cart xx,xy,xz,yy,yz,zz ; cols: xy, yz, 3z2-r2, xz, x2-y2
                b = np.zeros((6, 5))
                b[1, 0] = 1.0
                b[4, 1] = 1.0
                b[0, 2] = -1.0
                b[3, 2] = -1.0
                b[5, 2] = 2.0
                b[2, 3] = 1.0
                b[0, 4] = 1.0
                b[3, 4] = -1.0
                blocks.append(b)
            else:
                raise ValueError("only s, p, d shells supported")
        n_sph = sum(b.shape[1] for b in blocks)
        out = np.zeros((self.n_cart, n_sph))
        row = col = 0
        for b in blocks:
            out[row : row + b.shape[0], col : col + b.shape[1]] = b
            row += b.shape[0]
            col += b.shape[1]
        return out


_SHELL_NAMES = {0: "s", 1: "p", 2: "d"}


def build_basis(atoms: list[tuple[str, np.ndarray]], basis: str) -> BasisSet:
    """atoms: list of (element, xyz in Angstrom)."""
    shell_l, centers, shell_atom = [], [], []
    prim_start, prim_count, prim_exp, prim_coef = [], [], [], []
    offsets, labels = [], []
    n_cart = 0
    atom_coords = np.array([np.asarray(xyz, dtype=float) * BOHR_PER_ANGSTROM for _, xyz in atoms])
    atom_charges = np.array([ATOMIC_NUMBER[el] for el, _ in atoms], dtype=float)
    for ai, (element, _) in enumerate(atoms):
        for l, prims in shells_for(element, basis):
            shell_l.append(l)
            centers.append(atom_coords[ai])
            shell_atom.append(ai)
            prim_start.append(len(prim_exp))
            prim_count.append(len(prims))
            for alpha, coef in prims:
                prim_exp.append(alpha)
                prim_coef.append(coef * primitive_norm(alpha, (l, 0, 0)))
            offsets.append(n_cart)
            for comp in CART_COMPONENTS[l]:
                tag = "".join("xyz"[i] * comp[i] for i in range(3)) or _SHELL_NAMES[l]
                labels.append(f"{ai} {element} {_SHELL_NAMES[l]}{tag if l > 0 else ''}")
            n_cart += len(CART_COMPONENTS[l])
    return BasisSet(
        shell_l=np.array(shell_l, dtype=np.int64),
        shell_center=np.array(centers),
        shell_atom=np.array(shell_atom, dtype=np.int64),
        prim_start=np.array(prim_start, dtype=np.int64),
        prim_count=np.array(prim_count, dtype=np.int64),
        prim_exp=np.array(prim_exp),
        prim_coef=np.array(prim_coef),
        shell_offset=np.array(offsets, dtype=np.int64),
        n_cart=n_cart,
        atom_coords=atom_coords,
        atom_charges=atom_charges,
        labels=labels,
    )


def nuclear_repulsion(basis: BasisSet) -> float:
    e = 0.0
    coords, charges = basis.atom_coords, basis.atom_charges
    for i in range(len(charges)):
        for j in range(i + 1, len(charges)):
            e += charges[i] * charges[j] / np.linalg.norm(coords[i] - coords[j])
    return float(e)
