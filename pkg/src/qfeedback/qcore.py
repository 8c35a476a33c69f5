"""Dense one- and two-qubit linear algebra.

States are complex numpy vectors of length 2 or 4, operators are 2x2 or 4x4
complex arrays. Qubit 1 is the most significant bit of the basis index, so the
two-qubit basis order is |00>, |01>, |10>, |11>.
"""
from __future__ import annotations

import enum

import numpy as np

from . import kernels

NORM_TOL = 1e-10
PSD_TOL = 1e-9

I2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)

for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z, KET0, KET1):
    _m.setflags(write=False)


class BellOutcome(enum.Enum):
    PHI_PLUS = 0
    PHI_MINUS = 1
    PSI_PLUS = 2
    PSI_MINUS = 3


_S = 1.0 / np.sqrt(2.0)
BELL_STATES = {
    BellOutcome.PHI_PLUS: np.array([_S, 0, 0, _S], dtype=np.complex128),
    BellOutcome.PHI_MINUS: np.array([_S, 0, 0, -_S], dtype=np.complex128),
    BellOutcome.PSI_PLUS: np.array([0, _S, _S, 0], dtype=np.complex128),
    BellOutcome.PSI_MINUS: np.array([0, _S, -_S, 0], dtype=np.complex128),
}
for _v in BELL_STATES.values():
    _v.setflags(write=False)


def qubit_count(x: np.ndarray) -> int:
    dim = x.shape[0]
    if dim not in (2, 4) or any(d != dim for d in x.shape):
        raise ValueError(f"expected a 1- or 2-qubit object, got shape {x.shape}")
    return 1 if dim == 2 else 2


def check_state(state) -> np.ndarray:
    """Return ``state`` as a complex vector, raising if it is not normalized."""
    v = np.asarray(state, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError("a pure state must be a vector")
    qubit_count(v)
    if not np.all(np.isfinite(v)):
        raise ValueError("state has non-finite amplitudes")
    if abs(np.vdot(v, v).real - 1.0) > NORM_TOL:
        raise ValueError("state is not normalized")
    return v


def check_density(rho) -> np.ndarray:
    m = np.asarray(rho, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("a density operator must be a matrix")
    qubit_count(m)
    if not np.all(np.isfinite(m)):
        raise ValueError("density operator has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(m).real - 1.0) > NORM_TOL:
        raise ValueError("density operator does not have unit trace")
    if np.min(np.linalg.eigvalsh(m)) < -PSD_TOL:
        raise ValueError("density operator is not positive semidefinite")
    return m


def is_unitary(u, tol: float = NORM_TOL) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) < tol)


def projector(state) -> np.ndarray:
    v = np.asarray(state, dtype=np.complex128)
    return np.outer(v, v.conj())


def pauli_exponential(c, lam: float) -> np.ndarray:
    """exp(i * lam * (c . sigma)) in axis-angle form.

    Uses cos(t) I + i sin(t) (n . sigma) with t = lam * |c| and n = c / |c|,
    which stays exact for the large rotation angles where a truncated power
    series would blow up. A zero vector gives the identity.
    """
    c = np.asarray(c, dtype=np.float64)
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        return I2.copy()
    n = c / norm
    theta = lam * norm
    n_sigma = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return np.cos(theta) * I2 + 1j * np.sin(theta) * n_sigma


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; ``a`` owns the high-order index."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("tensor_product needs two states or two operators")
    return np.kron(a, b)


def apply_single_qubit(state, u, target: int) -> np.ndarray:
    """Apply the 2x2 unitary ``u`` to qubit ``target`` (1 or 2) of a pair."""
    if target not in (1, 2):
        raise ValueError(f"target must be 1 or 2, got {target!r}")
    psi = np.asarray(state, dtype=np.complex128).reshape(2, 2)
    u = np.asarray(u, dtype=np.complex128)
    out = u @ psi if target == 1 else psi @ u.T
    return out.reshape(4)


def partial_trace(rho, keep: int) -> np.ndarray:
    """Reduced density operator of qubit ``keep`` from a two-qubit operator."""
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep!r}")
    r = np.asarray(rho, dtype=np.complex128).reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


def bell_probabilities(state) -> dict[BellOutcome, float]:
    v = np.asarray(state, dtype=np.complex128)
    return {k: float(abs(np.vdot(b, v)) ** 2) for k, b in BELL_STATES.items()}


def measure_bell_basis(state, rng: np.random.Generator) -> tuple[BellOutcome, float]:
    """Sample a Bell-basis measurement; returns the outcome and its probability."""
    probs = bell_probabilities(state)
    outcomes = list(BellOutcome)
    weights = np.array([probs[k] for k in outcomes])
    cdf = np.cumsum(weights)
    u = rng.random() * cdf[-1]
    idx = min(int(np.searchsorted(cdf, u, side="right")), len(outcomes) - 1)
    return outcomes[idx], float(weights[idx])


def bloch_vector(rho) -> np.ndarray:
    r = np.asarray(rho, dtype=np.complex128)
    return np.array([np.trace(r @ s).real for s in PAULIS])


def _xlog2x(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    mask = p > 0.0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def eigenvalues(rho) -> np.ndarray:
    """Spectrum of a density operator, clamped to [0, 1].

    One qubit uses the Bloch length, (1 +- |r|) / 2. Larger operators go
    through the Jacobi kernel.
    """
    r = np.asarray(rho, dtype=np.complex128)
    if r.shape == (2, 2):
        length = float(np.linalg.norm(bloch_vector(r)))
        ev = np.array([(1.0 - length) / 2.0, (1.0 + length) / 2.0])
    else:
        ev = kernels.jacobi_eigvalsh(r)
    return np.clip(ev, 0.0, 1.0)


def von_neumann_entropy(rho) -> float:
    """Entropy in bits."""
    return float(-np.sum(_xlog2x(eigenvalues(rho))))


def fidelity(a, b) -> float:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def hermitian_exp(h, t: float = 1.0) -> np.ndarray:
    """exp(i t H) for Hermitian H, via the Jacobi eigendecomposition."""
    w, v = kernels.jacobi_eigh(h)
    return (v * np.exp(1j * t * w)) @ v.conj().T
