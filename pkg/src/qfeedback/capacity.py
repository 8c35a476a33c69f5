"""Holevo quantity, plug-in mutual information and the classical baseline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import NoisyChannelConfig, averaged_channel, bsc_transmit
from .qcore import I2, KET0, KET1, PAULIS, bloch_vector, projector, von_neumann_entropy

ENSEMBLE_TOL = 1e-10


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


@dataclass(frozen=True)
class Ensemble:
    """Probability-weighted density operators of equal dimension."""

    entries: tuple

    def __init__(self, entries):
        entries = tuple((float(p), np.asarray(rho, dtype=np.complex128)) for p, rho in entries)
        if not entries:
            raise ValueError("ensemble is empty")
        shapes = {rho.shape for _, rho in entries}
        if len(shapes) != 1:
            raise ValueError(f"ensemble states have mismatched dimensions: {sorted(shapes)}")
        probs = np.array([p for p, _ in entries])
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > ENSEMBLE_TOL:
            raise ValueError("ensemble probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "entries", entries)

    def average(self) -> np.ndarray:
        return sum(p * rho for p, rho in self.entries)


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    chi_bits: float
    mc_samples: int
    seed: int


def holevo_quantity(e: Ensemble) -> float:
    """chi = S(sum p rho) - sum p S(rho), in bits."""
    mixed = von_neumann_entropy(e.average())
    parts = sum(p * von_neumann_entropy(rho) for p, rho in e.entries)
    return max(0.0, mixed - parts)


def noisy_subchannel_chi(lam: float, mc_samples: int, seed: int, stream: int = 0) -> SweepRecord:
    """Holevo quantity of {1/2: E(|0><0|), 1/2: E(|1><1|)} for the sampled channel.

    The random stream is keyed by ``(seed, stream)``.
    """
    if mc_samples < 1000:
        raise ValueError("mc_samples must be >= 1000")
    rng = np.random.default_rng([seed, stream])
    cfg = NoisyChannelConfig(lam)
    out0 = averaged_channel(cfg, projector(KET0), mc_samples, rng)
    out1 = averaged_channel(cfg, projector(KET1), mc_samples, rng)
    chi = holevo_quantity(Ensemble([(0.5, out0), (0.5, out1)]))
    return SweepRecord(float(lam), chi, int(mc_samples), int(seed))


def lambda_sweep(lambdas: Sequence[float], mc_samples: int, seed: int) -> list[SweepRecord]:
    if len(lambdas) == 0:
        raise ValueError("lambda grid is empty")
    return [noisy_subchannel_chi(lam, mc_samples, seed, stream=i) for i, lam in enumerate(lambdas)]


def sampled_bloch_map(lam: float, mc_samples: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Affine Bloch-vector map (M, t) of the averaged noisy subchannel.

    Estimated by pushing I/2 and the three Pauli-eigenstate projectors through
    ``averaged_channel`` with a shared set of draws each.
    """
    cfg = NoisyChannelConfig(lam)
    state = rng.bit_generator.state

    def push(rho):
        rng.bit_generator.state = state
        return bloch_vector(averaged_channel(cfg, rho, mc_samples, rng))

    t = push(I2 / 2)
    cols = [push((I2 + s) / 2) - t for s in PAULIS]
    return np.stack(cols, axis=1), t


def optimal_binary_chi(lam: float, mc_samples: int, rng: np.random.Generator, resolution=(32, 16)) -> float:
    """Best equiprobable pure-state pair chi over a Bloch-sphere grid.

    Cross-check for the fixed computational-basis ensemble. ``resolution`` is
    (azimuth, polar) grid points per state.
    """
    n_phi, n_theta = resolution
    phi = np.arange(n_phi) * 2 * np.pi / n_phi
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
    m, t = sampled_bloch_map(lam, mc_samples, rng)
    out = dirs @ m.T + t

    def h_of_len(r):
        r = np.clip(r, 0.0, 1.0)
        p = (1.0 + r) / 2.0
        q = 1.0 - p
        with np.errstate(divide="ignore", invalid="ignore"):
            h = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
        return h

    s_each = h_of_len(np.linalg.norm(out, axis=1))
    mid = (out[:, None, :] + out[None, :, :]) / 2.0
    s_mid = h_of_len(np.linalg.norm(mid, axis=2))
    chi = s_mid - (s_each[:, None] + s_each[None, :]) / 2.0
    return float(max(0.0, chi.max()))


def empirical_mutual_information(counts) -> float:
    """Plug-in I(X;Y) in bits from a joint count table."""
    j = np.asarray(counts, dtype=np.float64)
    total = j.sum()
    if total <= 0:
        raise ValueError("joint counts must have a positive total")
    if np.any(j < 0):
        raise ValueError("joint counts must be nonnegative")
    pxy = j / total
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    mask = pxy > 0
    ratio = pxy[mask] / (px @ py)[mask]
    return float(max(0.0, np.sum(pxy[mask] * np.log2(ratio))))


@dataclass(frozen=True)
class BaselineRow:
    slot: int
    noisy_bit_in: int
    noisy_bit_out: int
    quiet_payload_kind: str
    novel_bits_delivered: int


@dataclass
class BaselineLog:
    n_slots: int
    feedback_enabled: bool
    p_flip: float
    rows: list = field(default_factory=list)

    @property
    def novel_bits(self) -> int:
        return sum(r.novel_bits_delivered for r in self.rows)

    @property
    def throughput(self) -> float:
        return self.novel_bits / self.n_slots


def run_classical_baseline(
    feedback_enabled: bool, n_slots: int, rng: np.random.Generator, p_flip: float = 0.5
) -> BaselineLog:
    """Classical analog: one BSC(p_flip) and one noiseless binary subchannel.

    Each slot sends one bit on each subchannel. A noisy-subchannel bit counts
    as delivered only once the receiver can decode it unambiguously:

    * deterministic noisy subchannel (p_flip 0 or 1): every noisy bit is
      decodable at once, and the quiet subchannel carries fresh data;
    * otherwise, without feedback, the noisy subchannel is ignored;
    * otherwise, with feedback, slot t's quiet bit carries the true value of
      slot t-1's noisy bit (kind "retransmit" when that bit was corrupted,
      "confirm" when it was not). The receiver cannot tell these apart and does
      not need to: the quiet bit simply replaces the noisy reading. Slot 1's
      quiet bit has nothing to correct and carries fresh data.

    Only novel, correctly decoded data bits are counted.
    """
    if n_slots < 2:
        raise ValueError("n_slots must be >= 2")
    log = BaselineLog(n_slots, feedback_enabled, p_flip)
    deterministic = p_flip in (0.0, 1.0)
    prev = None  # (sent, received) on the noisy subchannel last slot
    for t in range(1, n_slots + 1):
        noisy_in = int(rng.integers(0, 2))
        noisy_out = bsc_transmit(noisy_in, p_flip, rng)
        novel = 0
        if deterministic:
            decoded = noisy_out ^ int(p_flip == 1.0)
            novel += int(decoded == noisy_in)
            kind = "fresh"
            novel += 1
        elif not feedback_enabled or prev is None:
            kind = "fresh"
            novel += 1
        else:
            sent_prev, recv_prev = prev
            kind = "retransmit" if sent_prev != recv_prev else "confirm"
            # quiet subchannel is noiseless, so the corrected bit always arrives
            novel += 1
        prev = (noisy_in, noisy_out)
        log.rows.append(BaselineRow(t, noisy_in, noisy_out, kind, novel))
    return log


def classical_baseline_capacity(
    feedback_enabled: bool, n_slots: int, rng: np.random.Generator, p_flip: float = 0.5
) -> float:
    """Novel-bit throughput of the classical analog in bits/slot."""
    return run_classical_baseline(feedback_enabled, n_slots, rng, p_flip).throughput
