"""Hot numeric kernels with a compiled path and a numpy fallback.

The active backend is chosen once at import: numba when it is installed and
``QFEEDBACK_DISABLE_NUMBA`` is unset, numpy otherwise. Both backends are
importable directly for parity tests and benchmarks.
"""
from __future__ import annotations

import numpy as np

from . import _kernels_numpy as numpy_kernels
from ._accel import USE_NUMBA

if USE_NUMBA:
    from . import _kernels_numba as numba_kernels

    _impl = numba_kernels
    BACKEND = "numba"
else:
    numba_kernels = None
    _impl = numpy_kernels
    BACKEND = "numpy"


def su2_exp_batch(cs, lams) -> np.ndarray:
    cs = np.ascontiguousarray(cs, dtype=np.float64).reshape(-1, 3)
    lams = np.ascontiguousarray(np.broadcast_to(np.asarray(lams, dtype=np.float64), cs.shape[:1]))
    return _impl.su2_exp_batch(cs, lams)


def channel_average(cs, lam: float, rho) -> np.ndarray:
    cs = np.ascontiguousarray(cs, dtype=np.float64).reshape(-1, 3)
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    return _impl.channel_average(cs, float(lam), rho)


def undo_fidelity_batch(cs, lams, pair) -> np.ndarray:
    cs = np.ascontiguousarray(cs, dtype=np.float64).reshape(-1, 3)
    lams = np.ascontiguousarray(np.broadcast_to(np.asarray(lams, dtype=np.float64), cs.shape[:1]))
    pair = np.ascontiguousarray(pair, dtype=np.complex128)
    return _impl.undo_fidelity_batch(cs, lams, pair)


def jacobi_eigvalsh(h, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    h = np.ascontiguousarray(h, dtype=np.complex128)
    return _impl.jacobi_eigvalsh(h, tol, max_sweeps)


def jacobi_eigh(h, tol: float = 1e-12, max_sweeps: int = 100):
    h = np.ascontiguousarray(h, dtype=np.complex128)
    return _impl.jacobi_eigh(h, tol, max_sweeps)
