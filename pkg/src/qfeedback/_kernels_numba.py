"""Compiled kernels. Same contracts as :mod:`qfeedback._kernels_numpy`."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _su2_entries(cx, cy, cz, lam):
    norm = np.sqrt(cx * cx + cy * cy + cz * cz)
    if norm == 0.0:
        return 1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j
    nx = cx / norm
    ny = cy / norm
    nz = cz / norm
    theta = lam * norm
    ct = np.cos(theta)
    st = np.sin(theta)
    u00 = complex(ct, st * nz)
    u01 = complex(st * ny, st * nx)
    u10 = complex(-st * ny, st * nx)
    u11 = complex(ct, -st * nz)
    return u00, u01, u10, u11


@njit(cache=True)
def su2_exp_batch(cs, lams):
    n = cs.shape[0]
    out = np.empty((n, 2, 2), dtype=np.complex128)
    for i in range(n):
        u00, u01, u10, u11 = _su2_entries(cs[i, 0], cs[i, 1], cs[i, 2], lams[i])
        out[i, 0, 0] = u00
        out[i, 0, 1] = u01
        out[i, 1, 0] = u10
        out[i, 1, 1] = u11
    return out


@njit(cache=True)
def channel_average(cs, lam, rho):
    n = cs.shape[0]
    acc = np.zeros((2, 2), dtype=np.complex128)
    r00 = rho[0, 0]
    r01 = rho[0, 1]
    r10 = rho[1, 0]
    r11 = rho[1, 1]
    for i in range(n):
        u00, u01, u10, u11 = _su2_entries(cs[i, 0], cs[i, 1], cs[i, 2], lam)
        # m = U rho
        m00 = u00 * r00 + u01 * r10
        m01 = u00 * r01 + u01 * r11
        m10 = u10 * r00 + u11 * r10
        m11 = u10 * r01 + u11 * r11
        # acc += m U^dagger
        acc[0, 0] += m00 * np.conj(u00) + m01 * np.conj(u01)
        acc[0, 1] += m00 * np.conj(u10) + m01 * np.conj(u11)
        acc[1, 0] += m10 * np.conj(u00) + m11 * np.conj(u01)
        acc[1, 1] += m10 * np.conj(u10) + m11 * np.conj(u11)
    return acc / n


@njit(cache=True)
def undo_fidelity_batch(cs, lams, pair):
    n = cs.shape[0]
    out = np.empty(n, dtype=np.float64)
    psi = pair.reshape(2, 2)
    for i in range(n):
        u00, u01, u10, u11 = _su2_entries(cs[i, 0], cs[i, 1], cs[i, 2], lams[i])
        # (U x U) psi == U psi U^T in matrix form, unrolled
        m00 = u00 * psi[0, 0] + u01 * psi[1, 0]
        m01 = u00 * psi[0, 1] + u01 * psi[1, 1]
        m10 = u10 * psi[0, 0] + u11 * psi[1, 0]
        m11 = u10 * psi[0, 1] + u11 * psi[1, 1]
        ov = (
            np.conj(psi[0, 0]) * (m00 * u00 + m01 * u01)
            + np.conj(psi[0, 1]) * (m00 * u10 + m01 * u11)
            + np.conj(psi[1, 0]) * (m10 * u00 + m11 * u01)
            + np.conj(psi[1, 1]) * (m10 * u10 + m11 * u11)
        )
        out[i] = ov.real * ov.real + ov.imag * ov.imag
    return out


@njit(cache=True)
def jacobi_eigh(h, tol=1e-12, max_sweeps=100):
    a = h.astype(np.complex128).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q].real ** 2 + a[p, q].imag ** 2
        if np.sqrt(off) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                sgn = 1.0 if theta >= 0.0 else -1.0
                t = sgn / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q] * np.conj(phase)
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                    vkp = v[k, p]
                    vkq = v[k, q] * np.conj(phase)
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k] * phase
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w, kind="mergesort")
    return w[order], v[:, order]


@njit(cache=True)
def jacobi_eigvalsh(h, tol=1e-12, max_sweeps=100):
    return jacobi_eigh(h, tol, max_sweeps)[0]
