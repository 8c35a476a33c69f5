"""Pure-numpy reference kernels.

These mirror :mod:`qfeedback._kernels_numba` one for one. The batch kernels are
vectorised; the Jacobi eigensolver runs the same cyclic sweep as the compiled
version in plain Python.
"""
from __future__ import annotations

import numpy as np

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def su2_exp_batch(cs: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """exp(i * lam * c.sigma) for every row of ``cs``, shape (N, 2, 2)."""
    cs = np.asarray(cs, dtype=np.float64)
    lams = np.broadcast_to(np.asarray(lams, dtype=np.float64), cs.shape[:1])
    norm = np.sqrt(np.einsum("ij,ij->i", cs, cs))
    theta = lams * norm
    safe = np.where(norm > 0.0, norm, 1.0)
    n = cs / safe[:, None]
    n[norm == 0.0] = 0.0
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    out = np.empty((cs.shape[0], 2, 2), dtype=np.complex128)
    out[:, 0, 0] = cos_t + 1j * sin_t * n[:, 2]
    out[:, 0, 1] = sin_t * n[:, 1] + 1j * sin_t * n[:, 0]
    out[:, 1, 0] = -sin_t * n[:, 1] + 1j * sin_t * n[:, 0]
    out[:, 1, 1] = cos_t - 1j * sin_t * n[:, 2]
    return out


def channel_average(cs: np.ndarray, lam: float, rho: np.ndarray) -> np.ndarray:
    """Mean of U(c) rho U(c)^dagger over the rows of ``cs``."""
    us = su2_exp_batch(cs, np.full(cs.shape[0], lam))
    acc = np.einsum("nij,jk,nlk->il", us, rho, us.conj())
    return acc / cs.shape[0]


def undo_fidelity_batch(cs: np.ndarray, lams: np.ndarray, pair: np.ndarray) -> np.ndarray:
    """|<pair| (U(c, lam) x U(c, lam)) |pair>|^2 for each row."""
    us = su2_exp_batch(cs, lams)
    psi = pair.reshape(2, 2)
    # qubit 1 is the row index, qubit 2 the column index
    out_states = np.einsum("nij,jk,nlk->nil", us, psi, us)
    overlap = np.einsum("il,nil->n", psi.conj(), out_states)
    return np.abs(overlap) ** 2


def jacobi_eigh(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigenpairs of a small Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot a[p, q], then applies a
    real plane rotation that zeroes it. Stops once the off-diagonal Frobenius
    norm drops below ``tol``. Returns ascending eigenvalues and the matching
    eigenvectors as columns.
    """
    a = np.array(h, dtype=np.complex128, copy=True)
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
                # columns: A <- A J, V <- V J
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q] * np.conj(phase)
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                    vkp = v[k, p]
                    vkq = v[k, q] * np.conj(phase)
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
                # rows: A <- J^dagger A
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k] * phase
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def jacobi_eigvalsh(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    return jacobi_eigh(h, tol, max_sweeps)[0]
