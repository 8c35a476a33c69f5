import math
from collections import Counter

import numpy as np
import pytest

from qfeedback import kernels
from qfeedback.channels import ChannelParam, FlipChannelConfig, NoisyChannelConfig, noisy_transmit
from qfeedback.protocol import (
    ALL_MESSAGES,
    BellMessage,
    helper_feedback_round,
    make_singlet,
    pair_spin_rotation,
    pauli_twirl_pair,
    run_pair_protocol,
    superdense_decode,
    superdense_encode,
    total_spin_operator,
    undo_operator,
    verify_undo_identity,
)
from qfeedback.qcore import (
    BELL_STATES,
    I2,
    BellOutcome,
    bell_probabilities,
    is_unitary,
    partial_trace,
    pauli_exponential,
    projector,
)
from qfeedback.simulation import FeedbackLinkConfig, quantize_feedback

S2 = 1 / math.sqrt(2)
PHI_PLUS = np.array([S2, 0, 0, S2], dtype=np.complex128)


class TestSinglet:
    def test_amplitudes(self):
        np.testing.assert_allclose(make_singlet(), [0, S2, -S2, 0])
        assert np.linalg.norm(make_singlet()) == pytest.approx(1.0)

    def test_marginal_is_maximally_mixed(self):
        np.testing.assert_allclose(partial_trace(projector(make_singlet()), 1), I2 / 2, atol=1e-15)

    def test_null_vector_of_total_spin(self):
        for comp in total_spin_operator():
            assert np.abs(comp @ make_singlet()).max() < 1e-12
            np.testing.assert_allclose(comp, comp.conj().T)


class TestUndo:
    def test_zero_param(self):
        np.testing.assert_array_equal(undo_operator(ChannelParam([0, 0, 0]), 3.0), I2)

    def test_same_matrix_as_channel(self, rng):
        for _ in range(100):
            c = rng.standard_normal(3)
            lam = rng.uniform(0, 20)
            u = undo_operator(ChannelParam(c), lam)
            np.testing.assert_array_equal(u, pauli_exponential(c, lam))
            assert is_unitary(u, 1e-10)

    def test_identity_on_singlet(self, rng):
        for _ in range(200):
            assert verify_undo_identity(ChannelParam(rng.standard_normal(3)), 1.0) >= 1 - 1e-10
        assert verify_undo_identity(ChannelParam([0, 0, 0]), 5.0) == pytest.approx(1.0)

    def test_identity_batch(self):
        rng = np.random.default_rng(31)
        fids = kernels.undo_fidelity_batch(rng.standard_normal((10_000, 3)), rng.uniform(0, 20, 10_000), make_singlet())
        assert fids.min() >= 1 - 1e-9

    @pytest.mark.xfail(
        strict=True,
        reason="for a y-axis rotation U^T = U^-1, so (U x U) phi+ = phi+ exactly; the claimed drop needs an x or z axis",
    )
    def test_phi_plus_y_axis_is_not_fixed(self):
        assert verify_undo_identity(ChannelParam([0, 1, 0]), math.pi / 4, PHI_PLUS) < 1 - 1e-9

    def test_phi_plus_direct_expansion(self):
        # y axis: U = (I + i sigma_y)/sqrt2 = [[1, 1], [-1, 1]]/sqrt2, and U x U maps
        # (|00> + |11>)/sqrt2 to itself
        u = np.array([[1, 1], [-1, 1]]) / math.sqrt(2)
        np.testing.assert_allclose(pauli_exponential([0, 1, 0], math.pi / 4), u, atol=1e-15)
        np.testing.assert_allclose(np.kron(u, u) @ PHI_PLUS, PHI_PLUS, atol=1e-15)
        # x and z axes take phi+ to an orthogonal Bell state
        assert verify_undo_identity(ChannelParam([1, 0, 0]), math.pi / 4, PHI_PLUS) < 1e-12
        assert verify_undo_identity(ChannelParam([0, 0, 1]), math.pi / 4, PHI_PLUS) < 1e-12

    def test_operator_form(self, rng):
        s = make_singlet()
        for _ in range(100):
            c = rng.standard_normal(3)
            lam = rng.uniform(0, 20)
            u = pauli_exponential(c, lam)
            assert np.linalg.norm(np.kron(u, u) @ s - s) < 1e-9
            assert np.linalg.norm(pair_spin_rotation(ChannelParam(c), lam) @ s - s) < 1e-8

    def test_spin_rotation_equals_tensor_square(self, rng):
        c = rng.standard_normal(3)
        u = pauli_exponential(c, 0.8)
        np.testing.assert_allclose(pair_spin_rotation(ChannelParam(c), 0.8), np.kron(u, u), atol=1e-12)


class TestCodec:
    def test_message_roundtrip_int(self):
        assert [BellMessage.from_int(i).to_int() for i in range(4)] == [0, 1, 2, 3]
        with pytest.raises(ValueError):
            BellMessage(2, 0)

    def test_identity_message(self):
        np.testing.assert_array_equal(superdense_encode(BellMessage(0, 0), make_singlet()), make_singlet())

    def test_encoded_states_orthogonal(self):
        states = [superdense_encode(m, make_singlet()) for m in ALL_MESSAGES]
        for i in range(4):
            for j in range(i + 1, 4):
                assert abs(np.vdot(states[i], states[j])) < 1e-10

    def test_x_gives_phi_minus(self):
        probs = bell_probabilities(superdense_encode(BellMessage(0, 1), make_singlet()))
        assert probs[BellOutcome.PHI_MINUS] == pytest.approx(1.0)

    def test_encode_requires_singlet(self):
        with pytest.raises(ValueError):
            superdense_encode(BellMessage(1, 0), PHI_PLUS)

    def test_roundtrip_all(self, rng):
        for m in ALL_MESSAGES:
            for _ in range(20):
                assert superdense_decode(superdense_encode(m, make_singlet()), rng) == m

    def test_singlet_decodes_to_zero(self, rng):
        assert superdense_decode(make_singlet(), rng) == BellMessage(0, 0)

    def test_twirled_pair_decodes_uniformly(self):
        rng = np.random.default_rng(32)
        counts = Counter()
        for i in range(10_000):
            state = superdense_encode(ALL_MESSAGES[i % 4], make_singlet())
            counts[superdense_decode(pauli_twirl_pair(state, rng), rng)] += 1
        for m in ALL_MESSAGES:
            assert abs(counts[m] / 10_000 - 0.25) < 0.02

    def test_bell_states_table(self):
        states = {m: superdense_encode(m, make_singlet()) for m in ALL_MESSAGES}
        expected = {
            BellMessage(0, 0): BellOutcome.PSI_MINUS,
            BellMessage(0, 1): BellOutcome.PHI_MINUS,
            BellMessage(1, 0): BellOutcome.PSI_PLUS,
            BellMessage(1, 1): BellOutcome.PHI_PLUS,
        }
        for m, outcome in expected.items():
            assert abs(np.vdot(BELL_STATES[outcome], states[m])) == pytest.approx(1.0)


def _error_rate(lam, feedback, trials, seed, **kw):
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, 4, size=trials)
    return sum(not run_pair_protocol(BellMessage.from_int(int(m)), NoisyChannelConfig(lam), feedback, rng, **kw).correct for m in msgs) / trials


class TestPairProtocol:
    @pytest.mark.parametrize("feedback", [True, False])
    def test_noiseless(self, rng, feedback):
        for m in ALL_MESSAGES:
            tr = run_pair_protocol(m, NoisyChannelConfig(0.0), feedback, rng)
            assert tr.decoded == m and tr.undo_applied == feedback
            assert tr.bell_outcome is not None and tr.p_correct == pytest.approx(1.0)

    def test_feedback_is_exact(self):
        rng = np.random.default_rng(33)
        for i in range(1000):
            tr = run_pair_protocol(ALL_MESSAGES[i % 4], NoisyChannelConfig(10.0), True, rng)
            assert tr.correct and tr.p_correct > 1 - 1e-9

    @pytest.mark.xfail(strict=True, reason="the pair is rotated by exp(i theta n.sigma) with theta ~ uniform mod pi; P(correct) = E[cos^2 theta] = 1/2")
    def test_no_feedback_error_rate_three_quarters(self):
        assert abs(_error_rate(10.0, False, 10_000, 34) - 0.75) <= 0.02

    def test_no_feedback_error_rate_closed_form(self):
        # P(correct) = E[cos^2(lam |c|)] = (1 + (1 - 4 lam^2) exp(-2 lam^2)) / 2
        for lam in (0.5, 1.0, 10.0):
            expected = 1 - (1 + (1 - 4 * lam**2) * math.exp(-2 * lam**2)) / 2
            assert _error_rate(lam, False, 10_000, 34) == pytest.approx(expected, abs=0.02)

    def test_feedback_never_worse(self):
        for lam in (0, 0.5, 1, 2, 5, 10):
            assert _error_rate(lam, True, 2000, 35) <= _error_rate(lam, False, 2000, 35)

    def test_fused_operator_same_statistics(self):
        a = [run_pair_protocol(m, NoisyChannelConfig(3.0), True, np.random.default_rng(36)) for m in ALL_MESSAGES]
        b = [run_pair_protocol(m, NoisyChannelConfig(3.0), True, np.random.default_rng(36), fuse=True) for m in ALL_MESSAGES]
        for x, y in zip(a, b):
            assert x.decoded == y.decoded and x.p_correct == pytest.approx(y.p_correct, abs=1e-12)

    def test_quantized_feedback_link(self):
        fb = FeedbackLinkConfig(16, 5.0)
        assert _error_rate(5.0, True, 10_000, 37, feedback_link=lambda c: quantize_feedback(c, fb)) < 0.01

    def test_no_signaling(self):
        rng = np.random.default_rng(38)
        acc = sum(partial_trace(projector(noisy_transmit(make_singlet(), NoisyChannelConfig(10.0), rng).output_state), 2) for _ in range(2000))
        np.testing.assert_allclose(acc / 2000, I2 / 2, atol=0.02)


class TestHelperFeedback:
    def test_transmitter_always_infers(self):
        rng = np.random.default_rng(39)
        rounds = [helper_feedback_round(FlipChannelConfig(0.5, 1), int(rng.integers(0, 2)), rng) for _ in range(10_000)]
        assert all(r.inferred_flip == r.true_flip for r in rounds)
        blind = sum(r.receiver_blind_guess_correct for r in rounds) / len(rounds)
        assert abs(blind - 0.5) < 0.015

    def test_many_helpers(self, rng):
        for _ in range(500):
            r = helper_feedback_round(FlipChannelConfig(0.5, 4), 1, rng)
            assert r.inferred_flip == r.true_flip

    def test_no_flip_channel(self, rng):
        assert not any(helper_feedback_round(FlipChannelConfig(0.0), 0, rng).inferred_flip for _ in range(200))

    def test_needs_a_helper(self, rng):
        with pytest.raises(ValueError):
            helper_feedback_round(FlipChannelConfig(0.5, 0), 0, rng)
