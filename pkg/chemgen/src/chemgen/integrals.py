"""McMurchie-Davidson Gaussian integrals (s, p, d shells).

One-electron matrices come back in the cartesian AO basis; callers may
contract d shells to spherical components with the BasisSet transform.
The ERI tensor is chemist-ordered: eri[i,j,k,l] = (ij|kl).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .basis import BasisSet

_CART = np.zeros((3, 6, 3), dtype=np.int64)
_CART[0, 0] = (0, 0, 0)
_CART[1, :3] = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
_CART[2, :6] = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
_NCOMP = np.array([1, 3, 6], dtype=np.int64)

_MAX_L = 2
_E_DIM = 2 * _MAX_L + 3   # t index bound for E arrays (room for kinetic's l+2)


@njit(cache=True)
def _boys(m_max, x, out):
    if x < 1e-13:
        for m in range(m_max + 1):
            out[m] = 1.0 / (2.0 * m + 1.0)
        return
    ex = np.exp(-x)
    if x < 35.0:
        m_top = m_max + 25
        term = 1.0 / (2.0 * m_top + 1.0)
        total = term
        k = 0
        while term > 1e-17 * total and k < 300:
            k += 1
            term *= 2.0 * x / (2.0 * m_top + 2.0 * k + 1.0)
            total += term
        f = ex * total
        for m in range(m_top, m_max, -1):
            f = (2.0 * x * f + ex) / (2.0 * m - 1.0)
        out[m_max] = f
        for m in range(m_max, 0, -1):
            out[m - 1] = (2.0 * x * out[m] + ex) / (2.0 * m - 1.0)
    else:
        out[0] = 0.5 * np.sqrt(np.pi / x)
        for m in range(m_max):
            out[m + 1] = ((2.0 * m + 1.0) * out[m] - ex) / (2.0 * x)


@njit(cache=True)
def _e_coeffs(l1, l2, a, b, ax, bx, out):
    """Hermite expansion E_t^{ij} for one cartesian direction.

    out[i, j, t]; includes the gaussian-product prefactor exp(-mu*Xab^2).
    Supports i <= l1, j <= l2 with l1, l2 up to _MAX_L + 2 (for kinetic).
    """
    p = a + b
    mu = a * b / p
    xab = ax - bx
    px = (a * ax + b * bx) / p
    pa = px - ax
    pb = px - bx
    out[:, :, :] = 0.0
    out[0, 0, 0] = np.exp(-mu * xab * xab)
    oo2p = 1.0 / (2.0 * p)
    for i in range(1, l1 + 1):
        for t in range(i + 1):
            v = pa * out[i - 1, 0, t]
            if t > 0:
                v += oo2p * out[i - 1, 0, t - 1]
            if t + 1 <= i - 1:
                v += (t + 1.0) * out[i - 1, 0, t + 1]
            out[i, 0, t] = v
    for j in range(1, l2 + 1):
        for i in range(l1 + 1):
            for t in range(i + j + 1):
                v = pb * out[i, j - 1, t]
                if t > 0:
                    v += oo2p * out[i, j - 1, t - 1]
                if t + 1 <= i + j - 1:
                    v += (t + 1.0) * out[i, j - 1, t + 1]
                out[i, j, t] = v


@njit(cache=True)
def _hermite_coulomb(l_total, p, x, y, z, f_buf, scratch, r_out):
    """R^0_{tuv}(p, PC) for all t+u+v <= l_total; fills r_out[t, u, v].

    f_buf, scratch and r_out are caller-owned buffers sized for the
    largest l_total in play, so the hot loop never allocates.
    """
    _boys(l_total, p * (x * x + y * y + z * z), f_buf)
    mp = 1.0
    for n in range(l_total + 1):
        scratch[n, 0, 0, 0] = mp * f_buf[n]
        mp *= -2.0 * p
    for n in range(l_total - 1, -1, -1):
        top = l_total - n
        for t in range(top + 1):
            for u in range(top + 1 - t):
                for v in range(top + 1 - t - u):
                    if t + u + v == 0:
                        continue
                    if t > 0:
                        val = x * scratch[n + 1, t - 1, u, v]
                        if t > 1:
                            val += (t - 1.0) * scratch[n + 1, t - 2, u, v]
                    elif u > 0:
                        val = y * scratch[n + 1, t, u - 1, v]
                        if u > 1:
                            val += (u - 1.0) * scratch[n + 1, t, u - 2, v]
                    else:
                        val = z * scratch[n + 1, t, u, v - 1]
                        if v > 1:
                            val += (v - 1.0) * scratch[n + 1, t, u, v - 2]
                    scratch[n, t, u, v] = val
    for t in range(l_total + 1):
        for u in range(l_total + 1 - t):
            for v in range(l_total + 1 - t - u):
                r_out[t, u, v] = scratch[0, t, u, v]


@njit(cache=True)
def _overlap_kinetic_kernel(
    shell_l, shell_center, prim_start, prim_count, prim_exp, prim_coef, shell_offset, n_cart
):
    s_mat = np.zeros((n_cart, n_cart))
    t_mat = np.zeros((n_cart, n_cart))
    n_shell = shell_l.size
    e = np.zeros((3, _MAX_L + 1, _MAX_L + 3, _E_DIM))
    for sa in range(n_shell):
        la = shell_l[sa]
        for sb in range(sa + 1):
            lb = shell_l[sb]
            na, nb = _NCOMP[la], _NCOMP[lb]
            block_s = np.zeros((na, nb))
            block_t = np.zeros((na, nb))
            for ka in range(prim_start[sa], prim_start[sa] + prim_count[sa]):
                a = prim_exp[ka]
                ca = prim_coef[ka]
                for kb in range(prim_start[sb], prim_start[sb] + prim_count[sb]):
                    b = prim_exp[kb]
                    cb = prim_coef[kb]
                    p = a + b
                    for d in range(3):
                        _e_coeffs(la, lb + 2, a, b, shell_center[sa, d], shell_center[sb, d], e[d])
                    pref = ca * cb * (np.pi / p) ** 1.5
                    for ia in range(na):
                        for ib in range(nb):
                            s1 = np.zeros(3)
                            t1 = np.zeros(3)
                            for d in range(3):
                                i = _CART[la, ia, d]
                                j = _CART[lb, ib, d]
                                s1[d] = e[d, i, j, 0]
                                term = -2.0 * b * b * e[d, i, j + 2, 0]
                                term += b * (2.0 * j + 1.0) * e[d, i, j, 0]
                                if j >= 2:
                                    term -= 0.5 * j * (j - 1.0) * e[d, i, j - 2, 0]
                                t1[d] = term
                            block_s[ia, ib] += pref * s1[0] * s1[1] * s1[2]
                            block_t[ia, ib] += pref * (
                                t1[0] * s1[1] * s1[2] + s1[0] * t1[1] * s1[2] + s1[0] * s1[1] * t1[2]
                            )
            oa, ob = shell_offset[sa], shell_offset[sb]
            for ia in range(na):
                for ib in range(nb):
                    s_mat[oa + ia, ob + ib] = block_s[ia, ib]
                    s_mat[ob + ib, oa + ia] = block_s[ia, ib]
                    t_mat[oa + ia, ob + ib] = block_t[ia, ib]
                    t_mat[ob + ib, oa + ia] = block_t[ia, ib]
    return s_mat, t_mat


@njit(cache=True)
def _nuclear_kernel(
    shell_l, shell_center, prim_start, prim_count, prim_exp, prim_coef, shell_offset, n_cart,
    atom_coords, atom_charges,
):
    v_mat = np.zeros((n_cart, n_cart))
    n_shell = shell_l.size
    e = np.zeros((3, _MAX_L + 1, _MAX_L + 3, _E_DIM))
    l_cap = 4 * _MAX_L
    f_buf = np.zeros(l_cap + 1)
    scratch = np.zeros((l_cap + 1, l_cap + 1, l_cap + 1, l_cap + 1))
    r = np.zeros((l_cap + 1, l_cap + 1, l_cap + 1))
    for sa in range(n_shell):
        la = shell_l[sa]
        for sb in range(sa + 1):
            lb = shell_l[sb]
            na, nb = _NCOMP[la], _NCOMP[lb]
            block = np.zeros((na, nb))
            for ka in range(prim_start[sa], prim_start[sa] + prim_count[sa]):
                a = prim_exp[ka]
                ca = prim_coef[ka]
                for kb in range(prim_start[sb], prim_start[sb] + prim_count[sb]):
                    b = prim_exp[kb]
                    cb = prim_coef[kb]
                    p = a + b
                    px = (a * shell_center[sa, 0] + b * shell_center[sb, 0]) / p
                    py = (a * shell_center[sa, 1] + b * shell_center[sb, 1]) / p
                    pz = (a * shell_center[sa, 2] + b * shell_center[sb, 2]) / p
                    for d in range(3):
                        _e_coeffs(la, lb, a, b, shell_center[sa, d], shell_center[sb, d], e[d])
                    l_total = int(la + lb)
                    pref = ca * cb * 2.0 * np.pi / p
                    for c in range(atom_charges.size):
                        _hermite_coulomb(
                            l_total, p,
                            px - atom_coords[c, 0], py - atom_coords[c, 1], pz - atom_coords[c, 2],
                            f_buf, scratch, r,
                        )
                        z_c = atom_charges[c]
                        for ia in range(na):
                            for ib in range(nb):
                                acc = 0.0
                                ix = _CART[la, ia, 0]
                                iy = _CART[la, ia, 1]
                                iz = _CART[la, ia, 2]
                                jx = _CART[lb, ib, 0]
                                jy = _CART[lb, ib, 1]
                                jz = _CART[lb, ib, 2]
                                for t in range(ix + jx + 1):
                                    for u in range(iy + jy + 1):
                                        for v in range(iz + jz + 1):
                                            acc += (
                                                e[0, ix, jx, t] * e[1, iy, jy, u] * e[2, iz, jz, v]
                                                * r[t, u, v]
                                            )
                                block[ia, ib] -= pref * z_c * acc
            oa, ob = shell_offset[sa], shell_offset[sb]
            for ia in range(na):
                for ib in range(nb):
                    v_mat[oa + ia, ob + ib] = block[ia, ib]
                    v_mat[ob + ib, oa + ia] = block[ia, ib]
    return v_mat


@njit(cache=True)
def _eri_kernel(
    shell_l, shell_center, prim_start, prim_count, prim_exp, prim_coef, shell_offset, n_cart
):
    g = np.zeros((n_cart, n_cart, n_cart, n_cart))
    n_shell = shell_l.size
    e1 = np.zeros((3, _MAX_L + 1, _MAX_L + 3, _E_DIM))
    e2 = np.zeros((3, _MAX_L + 1, _MAX_L + 3, _E_DIM))
    l_cap = 4 * _MAX_L
    f_buf = np.zeros(l_cap + 1)
    scratch = np.zeros((l_cap + 1, l_cap + 1, l_cap + 1, l_cap + 1))
    r = np.zeros((l_cap + 1, l_cap + 1, l_cap + 1))
    for sa in range(n_shell):
        la = shell_l[sa]
        for sb in range(sa + 1):
            lb = shell_l[sb]
            ab = sa * (sa + 1) // 2 + sb
            for sc in range(sa + 1):
                lc = shell_l[sc]
                for sd in range(sc + 1):
                    cd = sc * (sc + 1) // 2 + sd
                    if cd > ab:
                        continue
                    ld = shell_l[sd]
                    na, nb, nc, nd = _NCOMP[la], _NCOMP[lb], _NCOMP[lc], _NCOMP[ld]
                    block = np.zeros((na, nb, nc, nd))
                    rab2 = 0.0
                    rcd2 = 0.0
                    for d in range(3):
                        rab2 += (shell_center[sa, d] - shell_center[sb, d]) ** 2
                        rcd2 += (shell_center[sc, d] - shell_center[sd, d]) ** 2
                    for ka in range(prim_start[sa], prim_start[sa] + prim_count[sa]):
                        a = prim_exp[ka]
                        for kb in range(prim_start[sb], prim_start[sb] + prim_count[sb]):
                            b = prim_exp[kb]
                            p = a + b
                            cab = prim_coef[ka] * prim_coef[kb]
                            if abs(cab) * np.exp(-a * b / p * rab2) < 1e-16:
                                continue
                            px = (a * shell_center[sa, 0] + b * shell_center[sb, 0]) / p
                            py = (a * shell_center[sa, 1] + b * shell_center[sb, 1]) / p
                            pz = (a * shell_center[sa, 2] + b * shell_center[sb, 2]) / p
                            for d in range(3):
                                _e_coeffs(la, lb, a, b, shell_center[sa, d], shell_center[sb, d], e1[d])
                            for kc in range(prim_start[sc], prim_start[sc] + prim_count[sc]):
                                c = prim_exp[kc]
                                for kd in range(prim_start[sd], prim_start[sd] + prim_count[sd]):
                                    dd = prim_exp[kd]
                                    q = c + dd
                                    ccd = prim_coef[kc] * prim_coef[kd]
                                    if abs(ccd) * np.exp(-c * dd / q * rcd2) < 1e-16:
                                        continue
                                    qx = (c * shell_center[sc, 0] + dd * shell_center[sd, 0]) / q
                                    qy = (c * shell_center[sc, 1] + dd * shell_center[sd, 1]) / q
                                    qz = (c * shell_center[sc, 2] + dd * shell_center[sd, 2]) / q
                                    for d in range(3):
                                        _e_coeffs(lc, ld, c, dd, shell_center[sc, d], shell_center[sd, d], e2[d])
                                    alpha = p * q / (p + q)
                                    pref = (
                                        cab * ccd
                                        * 2.0 * np.pi ** 2.5
                                        / (p * q * np.sqrt(p + q))
                                    )
                                    l_total = int(la + lb + lc + ld)
                                    _hermite_coulomb(
                                        l_total, alpha,
                                        px - qx, py - qy, pz - qz, f_buf, scratch, r,
                                    )
                                    for ia in range(na):
                                        ix, iy, iz = _CART[la, ia, 0], _CART[la, ia, 1], _CART[la, ia, 2]
                                        for ib in range(nb):
                                            jx, jy, jz = _CART[lb, ib, 0], _CART[lb, ib, 1], _CART[lb, ib, 2]
                                            for ic in range(nc):
                                                kx, ky, kz = _CART[lc, ic, 0], _CART[lc, ic, 1], _CART[lc, ic, 2]
                                                for idd in range(nd):
                                                    lx, ly, lz = _CART[ld, idd, 0], _CART[ld, idd, 1], _CART[ld, idd, 2]
                                                    acc = 0.0
                                                    for t in range(ix + jx + 1):
                                                        for u in range(iy + jy + 1):
                                                            for v in range(iz + jz + 1):
                                                                eab = e1[0, ix, jx, t] * e1[1, iy, jy, u] * e1[2, iz, jz, v]
                                                                if eab == 0.0:
                                                                    continue
                                                                for tt in range(kx + lx + 1):
                                                                    for uu in range(ky + ly + 1):
                                                                        for vv in range(kz + lz + 1):
                                                                            ecd = e2[0, kx, lx, tt] * e2[1, ky, ly, uu] * e2[2, kz, lz, vv]
                                                                            if ecd == 0.0:
                                                                                continue
                                                                            sign = 1.0 if (tt + uu + vv) % 2 == 0 else -1.0
                                                                            acc += eab * ecd * sign * r[t + tt, u + uu, v + vv]
                                                    block[ia, ib, ic, idd] += pref * acc
                    oa, ob, oc, od = shell_offset[sa], shell_offset[sb], shell_offset[sc], shell_offset[sd]
                    for ia in range(na):
                        for ib in range(nb):
                            for ic in range(nc):
                                for idd in range(nd):
                                    val = block[ia, ib, ic, idd]
                                    i, j, k, l = oa + ia, ob + ib, oc + ic, od + idd
                                    g[i, j, k, l] = val
                                    g[j, i, k, l] = val
                                    g[i, j, l, k] = val
                                    g[j, i, l, k] = val
                                    g[k, l, i, j] = val
                                    g[l, k, i, j] = val
                                    g[k, l, j, i] = val
                                    g[l, k, j, i] = val
    return g


def overlap_kinetic(basis: BasisSet) -> tuple[np.ndarray, np.ndarray]:
    return _overlap_kinetic_kernel(
        basis.shell_l, basis.shell_center, basis.prim_start, basis.prim_count,
        basis.prim_exp, basis.prim_coef, basis.shell_offset, basis.n_cart,
    )


def nuclear_attraction(basis: BasisSet) -> np.ndarray:
    return _nuclear_kernel(
        basis.shell_l, basis.shell_center, basis.prim_start, basis.prim_count,
        basis.prim_exp, basis.prim_coef, basis.shell_offset, basis.n_cart,
        basis.atom_coords, basis.atom_charges,
    )


def electron_repulsion(basis: BasisSet) -> np.ndarray:
    return _eri_kernel(
        basis.shell_l, basis.shell_center, basis.prim_start, basis.prim_count,
        basis.prim_exp, basis.prim_coef, basis.shell_offset, basis.n_cart,
    )


def transform_spherical(basis: BasisSet, s, t, v, g):
    """Contract cartesian d shells to the 5 spherical components."""
    c = basis.cart_to_spherical()
    s2 = c.T @ s @ c
    t2 = c.T @ t @ c
    v2 = c.T @ v @ c
    g2 = np.einsum("ip,ijkl->pjkl", c, g, optimize=True)
    g2 = np.einsum("jq,pjkl->pqkl", c, g2, optimize=True)
    g2 = np.einsum("kr,pqkl->pqrl", c, g2, optimize=True)
    g2 = np.einsum("ls,pqrl->pqrs", c, g2, optimize=True)
    return s2, t2, v2, g2
