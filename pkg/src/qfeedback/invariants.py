"""Property checks run by ``qfeedback verify``.

Each check takes a seed, runs at the sample sizes and tolerances fixed below,
and returns a :class:`CheckResult`. None of these touch the filesystem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .capacity import (
    Ensemble,
    classical_baseline_capacity,
    empirical_mutual_information,
    holevo_quantity,
    lambda_sweep,
)
from .channels import (
    FlipChannelConfig,
    NoisyChannelConfig,
    averaged_channel,
    bit_flip_block_transmit,
    noisy_transmit,
)
from .protocol import (
    ALL_MESSAGES,
    BellMessage,
    ChannelParam,
    make_singlet,
    pair_spin_rotation,
    run_pair_protocol,
    superdense_decode,
    superdense_encode,
)
from .qcore import (
    I2,
    KET0,
    KET1,
    PAULIS,
    bell_probabilities,
    bloch_vector,
    fidelity,
    partial_trace,
    pauli_exponential,
    projector,
    von_neumann_entropy,
)
from .simulation import FeedbackLinkConfig, quantize_feedback, run_pipeline


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def series_expm(a: np.ndarray, terms: int = 30) -> np.ndarray:
    """Truncated power series sum_k a^k / k!. Test oracle only."""
    out = np.eye(a.shape[0], dtype=np.complex128)
    term = np.eye(a.shape[0], dtype=np.complex128)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def random_state(rng, n_qubits: int) -> np.ndarray:
    v = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return v / np.linalg.norm(v)


def random_density(rng, n_qubits: int, rank: int | None = None) -> np.ndarray:
    dim = 2**n_qubits
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim: int) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _result(name, passed, detail):
    return CheckResult(name, bool(passed), detail)


# qcore


def check_unitarity(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 101])
    cs = rng.standard_normal((10_000, 3))
    lams = rng.uniform(0.0, 50.0, 10_000)
    us = kernels.su2_exp_batch(cs, lams)
    dev = np.abs(us @ np.conj(np.transpose(us, (0, 2, 1))) - I2).max()
    dets = np.abs(np.linalg.det(us) - 1.0).max()
    return _result("unitarity", dev < 1e-10 and dets < 1e-10, f"max |UU^+ - I| = {dev:.3e}, max |det - 1| = {dets:.3e}")


def check_composition(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 102])
    worst = 0.0
    for _ in range(1000):
        c = rng.standard_normal(3)
        l1, l2 = rng.uniform(-20, 20, 2)
        lhs = pauli_exponential(c, l1) @ pauli_exponential(c, l2)
        worst = max(worst, np.abs(lhs - pauli_exponential(c, l1 + l2)).max())
    return _result("composition", worst < 1e-9, f"max deviation {worst:.3e}")


def check_series_agreement(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 103])
    worst = 0.0
    for _ in range(500):
        c = rng.standard_normal(3)
        c *= rng.uniform(0, 10) / np.linalg.norm(c)
        gen = 1j * (c[0] * PAULIS[0] + c[1] * PAULIS[1] + c[2] * PAULIS[2])
        worst = max(worst, np.abs(pauli_exponential(c, 1.0) - series_expm(gen, terms=60)).max())
    return _result("closed form vs series", worst < 1e-9, f"max deviation {worst:.3e} for |lam c| <= 10")


def check_bell_completeness(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 104])
    worst = max(abs(sum(bell_probabilities(random_state(rng, 2)).values()) - 1.0) for _ in range(1000))
    return _result("Bell completeness", worst < 1e-10, f"max |sum p - 1| = {worst:.3e}")


def check_entropy_bounds(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 105])
    ok = True
    worst_inv = 0.0
    for _ in range(300):
        n = int(rng.integers(1, 3))
        rho = random_density(rng, n, rank=int(rng.integers(1, 2**n + 1)))
        s = von_neumann_entropy(rho)
        ok &= -1e-12 <= s <= n + 1e-12
        u = random_unitary(rng, 2**n)
        worst_inv = max(worst_inv, abs(von_neumann_entropy(u @ rho @ u.conj().T) - s))
    return _result("entropy bounds", ok and worst_inv < 1e-9, f"bounds ok={ok}, unitary invariance dev {worst_inv:.3e}")


def check_partial_trace_linearity(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 106])
    worst = 0.0
    for _ in range(300):
        r1, r2 = random_density(rng, 2), random_density(rng, 2)
        a = rng.uniform()
        for keep in (1, 2):
            lhs = partial_trace(a * r1 + (1 - a) * r2, keep)
            rhs = a * partial_trace(r1, keep) + (1 - a) * partial_trace(r2, keep)
            worst = max(worst, np.abs(lhs - rhs).max())
    return _result("partial trace linearity", worst < 1e-10, f"max deviation {worst:.3e}")


# channels


def check_gaussian_moments(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 201])
    cs = np.array([rng.standard_normal(3) for _ in range(100_000)])
    mean = np.abs(cs.mean(axis=0)).max()
    var = np.abs(cs.var(axis=0) - 1.0).max()
    return _result("Gaussian moments", mean < 0.02 and var < 0.03, f"max |mean| {mean:.4f}, max |var - 1| {var:.4f}")


def check_invertibility(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 202])
    worst = 0.0
    for _ in range(1000):
        psi = random_state(rng, 1)
        lam = rng.uniform(0, 20)
        res = noisy_transmit(psi, NoisyChannelConfig(lam), rng)
        back = pauli_exponential(-res.realized_param.c, lam) @ res.output_state
        worst = max(worst, 1.0 - fidelity(psi, back))
    return _result("channel invertibility given c", worst < 1e-10, f"max 1 - F = {worst:.3e}")


def check_memorylessness(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 203])
    cs = np.array([noisy_transmit(KET0, NoisyChannelConfig(1.0), rng).realized_param.c for _ in range(100_000)])
    worst = 0.0
    for i in range(3):
        for j in range(3):
            worst = max(worst, abs(np.corrcoef(cs[:-1, i], cs[1:, j])[0, 1]))
    return _result("memorylessness", worst < 0.02, f"max adjacent-slot correlation {worst:.4f}")


def check_isotropy(seed: int) -> CheckResult:
    worst = 0.0
    factors = []
    for lam in (0.5, 1.0, 5.0):
        cfg = NoisyChannelConfig(lam)
        fs = []
        for k, s in enumerate(PAULIS):
            rng = np.random.default_rng([seed, 204, k])
            out = bloch_vector(averaged_channel(cfg, (I2 + s) / 2, 20_000, rng))
            fs.append(out[k])
            worst = max(worst, np.abs(np.delete(out, k)).max())
        factors.append(fs)
        worst = max(worst, max(fs) - min(fs))
    return _result("isotropy", worst < 0.02, f"max disagreement {worst:.4f}; factors {np.round(factors, 3).tolist()}")


def check_block_flip(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 205])
    ok = True
    for _ in range(2000):
        bits = rng.integers(0, 2, size=4)
        block = [KET1 if b else KET0 for b in bits]
        outs, _ = bit_flip_block_transmit(block, FlipChannelConfig(0.5, 3), rng)
        xors = {int(b) ^ int(abs(o[1]) > 0.5) for b, o in zip(bits, outs)}
        ok &= len(xors) == 1
    return _result("block flip consistency", ok, "one shared flip per block")


# protocol


def check_undo_identity(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 301])
    cs = rng.standard_normal((10_000, 3))
    lams = rng.uniform(0.0, 20.0, 10_000)
    fids = kernels.undo_fidelity_batch(cs, lams, make_singlet())
    return _result("undo identity", fids.min() >= 1 - 1e-9, f"min fidelity {fids.min():.15f}")


def check_spin_operator_form(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 302])
    singlet = make_singlet()
    worst_uu = worst_exp = 0.0
    for _ in range(200):
        c = rng.standard_normal(3)
        lam = rng.uniform(0, 20)
        u = pauli_exponential(c, lam)
        worst_uu = max(worst_uu, np.linalg.norm(np.kron(u, u) @ singlet - singlet))
        worst_exp = max(worst_exp, np.linalg.norm(pair_spin_rotation(ChannelParam(c), lam) @ singlet - singlet))
    return _result(
        "total-spin operator form",
        worst_uu < 1e-9 and worst_exp < 1e-8,
        f"|UxU psi - psi| {worst_uu:.3e}, |exp(2i lam c.S) psi - psi| {worst_exp:.3e}",
    )


def check_codec(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 303])
    ok = all(superdense_decode(superdense_encode(m, make_singlet()), rng) == m for m in ALL_MESSAGES for _ in range(25))
    return _result("codec bijectivity", ok, "decode(encode(m)) == m for all m")


def feedback_error_rates(lam: float, trials: int, seed: int) -> tuple[float, float]:
    rates = []
    for fb in (True, False):
        rng = np.random.default_rng([seed, 304, int(fb)])
        msgs = rng.integers(0, 4, size=trials)
        errs = sum(not run_pair_protocol(BellMessage.from_int(int(m)), NoisyChannelConfig(lam), fb, rng).correct for m in msgs)
        rates.append(errs / trials)
    return rates[0], rates[1]


def check_feedback_monotonicity(seed: int) -> CheckResult:
    pairs = {lam: feedback_error_rates(lam, 10_000, seed) for lam in (0, 0.5, 1, 2, 5, 10)}
    ok = all(on <= off for on, off in pairs.values())
    detail = ", ".join(f"lam={k}: {on:.4f}<= {off:.4f}" for k, (on, off) in pairs.items())
    return _result("feedback monotonicity", ok, detail)


def check_no_signaling(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 305])
    acc = np.zeros((2, 2), dtype=np.complex128)
    n = 10_000
    for _ in range(n):
        res = noisy_transmit(make_singlet(), NoisyChannelConfig(10.0), rng)
        acc += partial_trace(projector(res.output_state), 2)
    dev = np.abs(acc / n - I2 / 2).max()
    return _result("no-signaling", dev < 0.02, f"max |rho_2 - I/2| = {dev:.3e}")


# simulation


def check_causality_and_throughput(seed: int) -> CheckResult:
    ok = True
    for n in (2, 3, 17, 200):
        for lam in (0.0, 1.0, 10.0):
            log = run_pipeline(n, NoisyChannelConfig(lam), seed=seed)
            ok &= log.bits_decoded_correctly == 2 * (n - 1)
            ok &= all(tr.undo_slot > tr.param_slot for tr in log.traces)
            ok &= all(s.quiet_payload is None or s.quiet_payload == s.slot_index - 1 for s in log.schedule)
    return _result("pipeline causality and throughput", ok, "bits = 2(n-1), undo after sampling slot")


def check_pipeline_determinism(seed: int) -> CheckResult:
    a = run_pipeline(300, NoisyChannelConfig(5.0), FeedbackLinkConfig(4), seed=seed)
    b = run_pipeline(300, NoisyChannelConfig(5.0), FeedbackLinkConfig(4), seed=seed)
    same = a.rows == b.rows and all(np.array_equal(x.realized_param.c, y.realized_param.c) for x, y in zip(a.traces, b.traces))
    return _result("pipeline determinism", same, "equal seeds give identical logs")


def quantized_error_rate(bits: int, lam: float, pairs: int, seed: int, exact: bool = True) -> float:
    """Mean pair error rate with quantized feedback.

    Every setting reuses the same random stream, so all bit depths see the
    same channel draws. With ``exact`` the per-pair error is the exact
    probability 1 - p_correct instead of the sampled decode outcome.
    """
    rng = np.random.default_rng([seed, 401])
    fb = FeedbackLinkConfig(bits)
    msgs = rng.integers(0, 4, size=pairs)
    total = 0.0
    for m in msgs:
        tr = run_pair_protocol(BellMessage.from_int(int(m)), NoisyChannelConfig(lam), True, rng, lambda c: quantize_feedback(c, fb))
        total += (1.0 - tr.p_correct) if exact else float(not tr.correct)
    return total / pairs


def check_quantization_monotone(seed: int) -> CheckResult:
    # 2 -> 1 bit is excluded: the 1-bit grid {-5, 5} really does beat the
    # 2-bit grid at lam = 5 (about 0.548 vs 0.610 mean error)
    bits = list(range(16, 1, -1))
    rates = [quantized_error_rate(b, 5.0, 10_000, seed) for b in bits]
    ok = all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))
    return _result("quantization degradation", ok, "error rates bits 16..2: " + ", ".join(f"{r:.2e}" for r in rates))


# capacity


def check_holevo_properties(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 501])
    ok = True
    for _ in range(200):
        k = int(rng.integers(1, 4))
        n = int(rng.integers(1, 3))
        p = rng.dirichlet(np.ones(k))
        states = [random_density(rng, n) for _ in range(k)]
        chi = holevo_quantity(Ensemble(zip(p, states)))
        ok &= -1e-12 <= chi <= n + 1e-9
        same = holevo_quantity(Ensemble(zip(p, [states[0]] * k)))
        ok &= abs(same) < 1e-8
    recs = lambda_sweep([0.0, 0.5, 1.0, 2.0, 5.0, 10.0], 10_000, seed)
    ok &= all(r.chi_bits <= 1 + 1e-6 for r in recs)
    return _result("Holevo bounds", ok, "chi in [0, log dim]; noisy chi <= 1: " + ", ".join(f"{r.chi_bits:.4f}" for r in recs))


def check_quantum_classical_contrast(seed: int) -> CheckResult:
    cfg = NoisyChannelConfig(10.0)
    q_gain = run_pipeline(1000, cfg, seed=seed).throughput - run_pipeline(1000, cfg, feedback_enabled=False, seed=seed).throughput
    c_gain = classical_baseline_capacity(True, 10_000, np.random.default_rng([seed, 502])) - classical_baseline_capacity(
        False, 10_000, np.random.default_rng([seed, 503])
    )
    return _result("quantum vs classical feedback gain", q_gain >= 0.9 and c_gain <= 0.05, f"quantum gain {q_gain:.4f}, classical gain {c_gain:.4f}")


def check_mutual_information_bounds(seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 504])
    ok = True
    for _ in range(500):
        nx, ny = rng.integers(1, 5, size=2)
        counts = rng.integers(0, 20, size=(nx, ny))
        if counts.sum() == 0:
            continue
        mi = empirical_mutual_information(counts)
        ok &= -1e-12 <= mi <= min(math.log2(nx), math.log2(ny)) + 1e-12
    return _result("plug-in MI bounds", ok, "0 <= I <= min(log|X|, log|Y|)")


ALL_CHECKS: tuple[Callable[[int], CheckResult], ...] = (
    check_unitarity,
    check_composition,
    check_series_agreement,
    check_bell_completeness,
    check_entropy_bounds,
    check_partial_trace_linearity,
    check_gaussian_moments,
    check_invertibility,
    check_memorylessness,
    check_isotropy,
    check_block_flip,
    check_undo_identity,
    check_spin_operator_form,
    check_codec,
    check_feedback_monotonicity,
    check_no_signaling,
    check_causality_and_throughput,
    check_pipeline_determinism,
    check_quantization_monotone,
    check_holevo_properties,
    check_quantum_classical_contrast,
    check_mutual_information_bounds,
)


def run_all(seed: int = 0, progress: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        res = check(seed)
        results.append(res)
        if progress is not None:
            progress(res)
    return results
