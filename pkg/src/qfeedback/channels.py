"""Channel models for the two-subchannel system.

The noisy subchannel applies exp(i lam c.sigma) with c a standard normal
3-vector drawn fresh for every use. Gaussian draws come from
``numpy.random.Generator.standard_normal`` (ziggurat on PCG64), so equal seeds
give bit-identical parameter sequences.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .qcore import KET0, KET1, SIGMA_X, apply_single_qubit, pauli_exponential

__all__ = [
    "ChannelParam",
    "NoisyChannelConfig",
    "FlipChannelConfig",
    "TransmissionResult",
    "sample_channel_param",
    "noisy_transmit",
    "bit_flip_block_transmit",
    "quiet_transmit",
    "averaged_channel",
    "isotropic_shrink_factor",
    "bsc_transmit",
]


@dataclass(frozen=True)
class ChannelParam:
    c: np.ndarray

    def __post_init__(self):
        c = np.array(self.c, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(c)):
            raise ValueError("channel parameter must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def __eq__(self, other):
        return isinstance(other, ChannelParam) and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash(self.c.tobytes())


@dataclass(frozen=True)
class NoisyChannelConfig:
    lam: float

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be finite and >= 0, got {self.lam!r}")


@dataclass(frozen=True)
class FlipChannelConfig:
    p_flip: float = 0.5
    helpers_per_slot: int = 1

    def __post_init__(self):
        if not 0.0 <= self.p_flip <= 1.0:
            raise ValueError(f"p_flip must lie in [0, 1], got {self.p_flip!r}")
        if self.helpers_per_slot < 0:
            raise ValueError("helpers_per_slot must be >= 0")


@dataclass(frozen=True)
class TransmissionResult:
    output_state: np.ndarray
    # only the feedback link may forward this to the transmitter
    realized_param: ChannelParam


def sample_channel_param(rng: np.random.Generator) -> ChannelParam:
    return ChannelParam(rng.standard_normal(3))


def noisy_transmit(state, cfg: NoisyChannelConfig, rng: np.random.Generator) -> TransmissionResult:
    """Send one qubit through the noisy subchannel.

    A 2-vector is rotated directly. A 4-vector is treated as a pair whose first
    qubit is the one in transit.
    """
    param = sample_channel_param(rng)
    u = pauli_exponential(param.c, cfg.lam)
    psi = np.asarray(state, dtype=np.complex128)
    if psi.shape == (2,):
        out = u @ psi
    else:
        out = apply_single_qubit(psi, u, 1)
    return TransmissionResult(out, param)


def _basis_label(state) -> int:
    v = np.asarray(state, dtype=np.complex128)
    if v.shape == (2,):
        if np.allclose(v, KET0, atol=1e-10):
            return 0
        if np.allclose(v, KET1, atol=1e-10):
            return 1
    raise ValueError("bit-flip channel accepts only |0> or |1> inputs")


def bit_flip_block_transmit(block, cfg: FlipChannelConfig, rng: np.random.Generator):
    """One slot of the spin-flip channel.

    Every qubit in ``block`` sees the same event: all flipped with probability
    ``p_flip``, otherwise all untouched. Returns ``(outputs, true_flip)``;
    ``true_flip`` is for test oracles only.
    """
    for s in block:
        _basis_label(s)
    true_flip = bool(rng.random() < cfg.p_flip)
    if true_flip:
        outputs = [SIGMA_X @ np.asarray(s, dtype=np.complex128) for s in block]
    else:
        outputs = [np.array(s, dtype=np.complex128) for s in block]
    return outputs, true_flip


def quiet_transmit(state) -> np.ndarray:
    return np.array(state, dtype=np.complex128)


def averaged_channel(cfg: NoisyChannelConfig, rho, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Monte Carlo estimate of the receiver's state, (1/N) sum U rho U^dagger."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    cs = rng.standard_normal((n_samples, 3))
    out = kernels.channel_average(cs, cfg.lam, rho)
    out = 0.5 * (out + out.conj().T)
    return out / np.trace(out).real


def isotropic_shrink_factor(lam: float) -> float:
    """Closed-form Bloch contraction of the averaged noisy subchannel.

    The rotation angle is 2 lam |c| about an isotropic axis, so the mean Bloch
    vector is r (1/3 + 2/3 E[cos(2 lam |c|)]), and for a standard normal
    3-vector E[cos(k |c|)] = (1 - k^2) exp(-k^2 / 2). The limit for large lam
    is 1/3, not 0. Kept as a cross-check on the sampled channel.
    """
    k2 = 4.0 * lam * lam
    return 1.0 / 3.0 + (2.0 / 3.0) * (1.0 - k2) * np.exp(-k2 / 2.0)


def bsc_transmit(bit: int, p: float, rng: np.random.Generator) -> int:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return bit ^ int(rng.random() < p)
