import numpy as np
import pytest

from smrelay.channel import (
    ChannelRealization,
    interference_mask,
    sample_realization,
    stream_key,
)
from smrelay.scheme import (
    amp_gain_interference,
    amp_gain_no_interference,
    amplification_gains,
    apply_equivalent_channel,
    build_equivalent_channel,
    propagation_coeffs,
    simulate_signal_level,
)
from smrelay.topology import REGIME_INTERFERENCE, REGIME_NO_INTERFERENCE

KEY = stream_key(31337, 9)


def interference_realization(K: int, trial: int) -> ChannelRealization:
    return sample_realization(KEY, trial, K, np.ones(K))


def clipped_gains(re: ChannelRealization, P: float):
    return amplification_gains(re, P, REGIME_INTERFERENCE)


class TestAmplitudeGains:
    def test_no_interference_examples(self):
        assert amp_gain_no_interference(1.0, 100.0) ** 2 == pytest.approx(100.0 / 101.0)
        assert amp_gain_no_interference(0.0, 100.0) ** 2 == pytest.approx(100.0)
        a2 = amp_gain_no_interference(10.0, 100.0) ** 2
        assert 0.0099 < a2 < 0.01  # approaches 1/|h|^2 from below

    def test_clipped_examples(self):
        assert amp_gain_interference(0.0, 0.0, 100.0) == pytest.approx(1.0)
        assert amp_gain_interference(1.0, 0.0, 100.0) ** 2 == pytest.approx(100.0 / 101.0)

    def test_clip_keeps_leakthrough_below_unity(self):
        # Strong interference: a * |i| approaches 1 but never exceeds it.
        a = amp_gain_interference(0.0, 3.0, 1e8)
        assert a * 3.0 <= 1.0
        assert a * 3.0 == pytest.approx(1.0, abs=1e-6)

    def test_vector_form_matches_scalars(self):
        re = interference_realization(3, 0)
        ni = amplification_gains(re, 50.0, REGIME_NO_INTERFERENCE)
        cl = amplification_gains(re, 50.0, REGIME_INTERFERENCE)
        for k in range(3):
            assert ni.alpha[k] == pytest.approx(
                amp_gain_no_interference(re.h[k], 50.0), rel=1e-15
            )
            assert cl.alpha[k] == pytest.approx(
                amp_gain_interference(re.h[k], re.i[k], 50.0), rel=1e-15
            )

    def test_no_interference_ignores_interference_gain(self):
        re = interference_realization(2, 1)
        quiet = ChannelRealization(h=re.h, g=re.g, i=np.zeros_like(re.i))
        assert np.array_equal(
            amplification_gains(re, 10.0, REGIME_NO_INTERFERENCE).alpha,
            amplification_gains(quiet, 10.0, REGIME_NO_INTERFERENCE).alpha,
        )

    def test_errors(self):
        with pytest.raises(ValueError):
            amp_gain_no_interference(1.0, 0.0)
        with pytest.raises(ValueError):
            amplification_gains(interference_realization(2, 0), 10.0, "other")


class TestPropagationCoeffs:
    def test_identity_without_interference(self):
        re = sample_realization(KEY, 2, 3, np.zeros(3))
        gains = clipped_gains(re, 100.0)
        F = propagation_coeffs(re, gains, 3, 2)
        assert np.array_equal(F, np.eye(6, dtype=np.complex128))

    def test_single_hop_entry(self):
        # One sub-block, two relays: the only chain is relay 2 hearing relay
        # 1's forward, scaled by relay 2's own amplification.
        re = interference_realization(2, 3)
        gains = clipped_gains(re, 40.0)
        F = propagation_coeffs(re, gains, 2, 1)
        assert F[1, 0] == re.i[1] * gains.alpha[1]

    def test_two_hop_chain(self):
        re = interference_realization(2, 4)
        gains = clipped_gains(re, 40.0)
        F = propagation_coeffs(re, gains, 2, 2)
        f1 = re.i[0] * gains.alpha[0]
        f2 = re.i[1] * gains.alpha[1]
        assert F[2, 0] == pytest.approx(f1 * f2, rel=1e-15)
        assert F[3, 1] == pytest.approx(f2 * f1, rel=1e-15)
        assert F[3, 0] == pytest.approx(f2 * f1 * f2, rel=1e-15)

    def test_unit_lower_triangular(self):
        re = interference_realization(3, 5)
        gains = clipped_gains(re, 200.0)
        F = propagation_coeffs(re, gains, 3, 2)
        assert np.array_equal(np.diagonal(F), np.ones(6))
        assert np.array_equal(np.triu(F, 1), np.zeros((6, 6)))

    def test_entries_bounded_by_one(self):
        for K, N in [(2, 2), (3, 2), (4, 3)]:
            for t in range(50):
                re = interference_realization(K, t)
                for P in (1.0, 100.0, 1e6):
                    gains = clipped_gains(re, P)
                    F = propagation_coeffs(re, gains, K, N)
                    assert np.max(np.abs(F)) <= 1.0 + 1e-12

    def test_spectral_bound(self):
        for K, N in [(2, 2), (4, 3)]:
            NK = K * N
            for t in range(25):
                re = interference_realization(K, t)
                gains = clipped_gains(re, 1e4)
                F = propagation_coeffs(re, gains, K, N)
                top = np.linalg.eigvalsh(F @ F.conj().T)[-1]
                assert top <= NK * NK * (1.0 + 1e-12)


class TestEquivalentChannel:
    def test_diagonal_structure_without_interference(self):
        re = sample_realization(KEY, 6, 2, np.zeros(2))
        gains = clipped_gains(re, 100.0)
        ec = build_equivalent_channel(re, gains, 2, 2)
        expect = np.tile(re.g * gains.alpha * re.h, 2)
        assert np.array_equal(ec.H_T, np.diag(expect))
        mix = np.tile(re.g * gains.alpha, 2)
        assert np.array_equal(ec.P_N, np.eye(4) + np.diag((mix * np.conj(mix)).real))

    def test_matches_impulse_responses(self):
        re = interference_realization(3, 7)
        gains = clipped_gains(re, 100.0)
        ec = build_equivalent_channel(re, gains, 3, 2)
        NK = 6
        zeros = np.zeros((NK, 1), dtype=np.complex128)
        for col in range(NK):
            impulse = zeros.copy()
            impulse[col, 0] = 1.0
            from_x = simulate_signal_level(re, gains, 3, 2, 1, impulse, zeros, zeros)
            assert np.allclose(from_x[:, 0], ec.H_T[:, col], rtol=0, atol=1e-12)
            from_n = simulate_signal_level(re, gains, 3, 2, 1, zeros, impulse, zeros)
            assert np.allclose(from_n[:, 0], ec.noise_mix[:, col], rtol=0, atol=1e-12)

    def test_noise_covariance_is_at_least_identity(self):
        re = interference_realization(4, 8)
        gains = clipped_gains(re, 1e3)
        ec = build_equivalent_channel(re, gains, 4, 3)
        eigs = np.linalg.eigvalsh(ec.P_N)
        assert eigs[0] >= 1.0 - 1e-12
        assert np.allclose(ec.P_N, ec.P_N.conj().T)


class TestSimulator:
    def test_leakthrough_path_single_subblock(self):
        # With one sub-block and two relays, the second receive slot carries
        # g2 a2 i2 a1 h1 times the first symbol.
        re = interference_realization(2, 9)
        gains = clipped_gains(re, 100.0)
        x = np.zeros((2, 1), dtype=np.complex128)
        x[0, 0] = 1.0
        zeros = np.zeros_like(x)
        y = simulate_signal_level(re, gains, 2, 1, 1, x, zeros, zeros)
        expect = re.g[1] * gains.alpha[1] * re.i[1] * gains.alpha[0] * re.h[0]
        assert y[1, 0] == pytest.approx(expect, rel=1e-15)
        assert y[0, 0] == pytest.approx(re.g[0] * gains.alpha[0] * re.h[0], rel=1e-15)

    def test_matches_matrix_model(self):
        rng = np.random.default_rng(12)
        for K, N in [(2, 1), (2, 2), (3, 2), (4, 3)]:
            NK = N * K
            for t in range(5):
                re = interference_realization(K, 10 + t)
                gains = clipped_gains(re, 100.0)
                ec = build_equivalent_channel(re, gains, K, N)
                x, n, z = (
                    (rng.standard_normal((NK, 8)) + 1j * rng.standard_normal((NK, 8)))
                    / np.sqrt(2.0)
                    for _ in range(3)
                )
                y_sim = simulate_signal_level(re, gains, K, N, 8, x, n, z)
                y_mat = apply_equivalent_channel(ec, x, n, z)
                scale = max(float(np.linalg.norm(y_sim)), 1e-30)
                assert float(np.linalg.norm(y_sim - y_mat)) / scale <= 1e-9

    def test_dimension_mismatch_rejected(self):
        re = interference_realization(2, 0)
        gains = clipped_gains(re, 10.0)
        good = np.zeros((4, 3), dtype=np.complex128)
        bad = np.zeros((4, 2), dtype=np.complex128)
        with pytest.raises(ValueError):
            simulate_signal_level(re, gains, 2, 2, 3, good, good, bad)
        ec = build_equivalent_channel(re, gains, 2, 2)
        with pytest.raises(ValueError):
            apply_equivalent_channel(ec, np.zeros((2, 3), dtype=np.complex128), good, good)
        with pytest.raises(ValueError):
            apply_equivalent_channel(ec, good, good, bad)

    def test_realization_size_checked(self):
        re = interference_realization(2, 0)
        gains = clipped_gains(re, 10.0)
        with pytest.raises(ValueError):
            propagation_coeffs(re, gains, 3, 2)
