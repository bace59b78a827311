import numpy as np
import pytest

from blind_ofdm import precoder as precoding
from blind_ofdm.channel import Pdp, sample_channel
from blind_ofdm.constellation import build_split, phase_pattern, random_frames
from blind_ofdm.errors import (
    AmbiguityUnresolvableError,
    DegenerateCovarianceError,
    DimensionError,
    GramSingularityError,
    InvalidPilotError,
)
from blind_ofdm.estimator import (
    CovarianceAccumulator,
    EstimatorConfig,
    analytic_covariance,
    blind_estimate,
    correct_phase,
    estimate_phase_ambiguity,
    joint_estimate,
    phase_samples,
    pilot_phase_baseline,
)
from blind_ofdm.numerics import wrap_angle

CONST = build_split(8)


def matrix_product_covariance(H, W, Rd, sigma_n2):
    # Independent route: diag(H) W Rd W^H diag(H)^H + sigma_n2 I.
    D = np.diag(H)
    return D @ W @ Rd @ W.conj().T @ D.conj().T + sigma_n2 * np.eye(len(H))


def phase_free_nmse(H_est, H):
    phi = np.angle(np.vdot(H, H_est))
    return np.sum(np.abs(H_est * np.exp(-1j * phi) - H) ** 2) / np.sum(np.abs(H) ** 2)


def random_channel(rng, M, L=2, kind="exponential"):
    return sample_channel(Pdp(kind, L), M, rng).H


class TestAccumulator:
    def test_outer_product(self):
        R = CovarianceAccumulator(2).accumulate([1, 1j]).finalize()
        np.testing.assert_allclose(R, [[1, -1j], [1j, 1]])

    def test_idempotent_average(self, rng):
        y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        one = CovarianceAccumulator(4).accumulate(y).finalize()
        many = CovarianceAccumulator(4).accumulate(np.tile(y, (7, 1))).finalize()
        np.testing.assert_allclose(many, one, atol=1e-14)

    def test_merge_equals_single_stream(self, rng):
        y = rng.standard_normal((10, 4)) + 1j * rng.standard_normal((10, 4))
        whole = CovarianceAccumulator(4).accumulate(y)
        a = CovarianceAccumulator(4).accumulate(y[:3])
        b = CovarianceAccumulator(4).accumulate(y[3:])
        a.merge(b)
        assert a.count == 10
        np.testing.assert_allclose(a.finalize(), whole.finalize(), atol=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            CovarianceAccumulator(4).accumulate(np.ones(3))

    def test_empty(self):
        with pytest.raises(DegenerateCovarianceError):
            CovarianceAccumulator(4).finalize()

    def test_hermitian_psd(self, rng):
        y = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
        R = CovarianceAccumulator(6).accumulate(y).finalize()
        np.testing.assert_array_equal(R, R.conj().T)
        assert np.min(np.linalg.eigvalsh(R)) > -1e-10 * np.max(np.abs(R))

    def test_converges_to_model_split_source(self, rng):
        M = 8
        pre = precoding.build(M, 0.5)
        H = random_channel(rng, M)
        sigma_n2 = 3.0
        y = H * precoding.apply(pre, random_frames(CONST, M, 100_000, rng))
        y += np.sqrt(sigma_n2 / 2) * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
        R_hat = CovarianceAccumulator(M).accumulate(y).finalize()
        gram = pre.W @ CONST.source_covariance(M) @ pre.W.T
        R = analytic_covariance(H, gram, 1.0, sigma_n2)
        assert np.all(np.abs(R_hat - R) <= 0.05 * np.abs(R))

    def test_converges_to_model_white_source(self, rng):
        M = 8
        pre = precoding.build(M, 0.5)
        H = random_channel(rng, M)
        d = rng.standard_normal((100_000, M)) * np.sqrt(CONST.sigma_d2)
        y = H * precoding.apply(pre, d)
        R_hat = CovarianceAccumulator(M).accumulate(y).finalize()
        R = analytic_covariance(H, pre.P, CONST.sigma_d2, 0.0)
        assert np.all(np.abs(R_hat - R) <= 0.05 * np.abs(R))


class TestAnalyticCovariance:
    def test_flat_channel(self):
        pre = precoding.build(4, 0.5)
        np.testing.assert_allclose(analytic_covariance(np.ones(4), pre.P, 2.0, 0.0), 2.0 * pre.P)

    def test_two_subcarrier_example(self):
        pre = precoding.build(2, 0.5)
        H = np.array([1, 2j])
        R = analytic_covariance(H, pre.P, 1.0, 0.0)
        # P = [[1.25, -1], [-1, 1.25]] ; R_ij = H_i conj(H_j) P_ij
        np.testing.assert_allclose(R, [[1.25, 2j], [-2j, 5.0]], atol=1e-15)
        np.testing.assert_allclose(R, matrix_product_covariance(H, pre.W, np.eye(2), 0.0), atol=1e-15)

    def test_two_forms_agree(self, rng):
        for M in (4, 16, 64):
            pre = precoding.build(M, rng.uniform(0.05, 0.95))
            H = rng.standard_normal(M) + 1j * rng.standard_normal(M)
            s2, n2 = rng.uniform(0.5, 30), rng.uniform(0, 2)
            a = analytic_covariance(H, pre.P, s2, n2)
            b = matrix_product_covariance(H, pre.W, s2 * np.eye(M), n2)
            assert np.max(np.abs(a - b)) < 1e-12 * max(1.0, np.max(np.abs(a)))

    def test_general_source_gram(self, rng):
        M = 8
        pre = precoding.build(M, 0.5)
        Rd = CONST.source_covariance(M)
        H = random_channel(rng, M)
        a = analytic_covariance(H, pre.W @ Rd @ pre.W.T, 1.0, 0.2)
        np.testing.assert_allclose(a, matrix_product_covariance(H, pre.W, Rd, 0.2), atol=1e-10)


class TestJointEstimate:
    @pytest.mark.parametrize("M", [4, 8, 16, 64])
    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_exact_covariance_recovery(self, M, p, rng):
        pre = precoding.build(M, p)
        cfg = EstimatorConfig(pre, CONST.sigma_d2, sigma_n2=0.4)
        H = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        H_est = joint_estimate(analytic_covariance(H, pre.P, CONST.sigma_d2, 0.4), cfg)
        assert phase_free_nmse(H_est, H) < 1e-10

    def test_exact_covariance_split_source(self, rng):
        M = 64
        pre = precoding.build(M, 0.5)
        Rd = CONST.source_covariance(M)
        cfg = EstimatorConfig(pre, CONST.sigma_d2, Rd, sigma_n2=0.1)
        H = random_channel(rng, M)
        R = matrix_product_covariance(H, pre.W, Rd, 0.1)
        assert phase_free_nmse(joint_estimate(R, cfg), H) < 1e-10

    def test_white_assumption_on_split_data_is_biased(self, rng):
        # The split source is not white; assuming it is inflates |H| by ~7x at M=64.
        M = 64
        pre = precoding.build(M, 0.5)
        H = random_channel(rng, M)
        R = matrix_product_covariance(H, pre.W, CONST.source_covariance(M), 0.0)
        H_est = joint_estimate(R, EstimatorConfig(pre, CONST.sigma_d2))
        assert phase_free_nmse(H_est, H) > 10

    def test_flat_channel(self):
        pre = precoding.build(8, 0.5)
        H_est = joint_estimate(analytic_covariance(np.ones(8), pre.P, 1.0, 0.0), EstimatorConfig(pre, 1.0))
        np.testing.assert_allclose(H_est, np.ones(8), atol=1e-10)  # canonical phase is real-positive

    def test_denoise_projection_is_idempotent_in_subspace(self, rng):
        M, L = 64, 2
        pre = precoding.build(M, 0.5)
        H = random_channel(rng, M, L)
        R = analytic_covariance(H, pre.P, 1.0, 0.0)
        plain = joint_estimate(R, EstimatorConfig(pre, 1.0))
        projected = joint_estimate(R, EstimatorConfig(pre, 1.0, denoise_taps=L + 1))
        np.testing.assert_allclose(projected, plain, atol=1e-12)

    def test_denoise_helps_with_samples(self, rng):
        M, L = 64, 2
        pre = precoding.build(M, 0.5)
        Rd = CONST.source_covariance(M)
        H = random_channel(rng, M, L)
        sigma_n2 = 50.0
        y = H * precoding.apply(pre, random_frames(CONST, M, 50, rng))
        y += np.sqrt(sigma_n2 / 2) * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
        R = CovarianceAccumulator(M).accumulate(y).finalize()
        raw = joint_estimate(R, EstimatorConfig(pre, CONST.sigma_d2, Rd, sigma_n2=sigma_n2))
        den = joint_estimate(R, EstimatorConfig(pre, CONST.sigma_d2, Rd, sigma_n2=sigma_n2, denoise_taps=L + 1))
        assert phase_free_nmse(den, H) < phase_free_nmse(raw, H)

    def test_gram_guard(self, rng):
        pre = precoding.build(4, 0.5)
        R = analytic_covariance(np.ones(4), pre.P, 1.0, 0.0)
        with pytest.raises(GramSingularityError):
            joint_estimate(R, EstimatorConfig(pre, 1.0, min_gram_entry=10.0))

    def test_degenerate(self):
        pre = precoding.build(4, 0.5)
        with pytest.raises(DegenerateCovarianceError):
            joint_estimate(np.eye(4) * 0.1, EstimatorConfig(pre, 1.0, sigma_n2=1.0))

    def test_estimated_noise_mode(self, rng):
        M = 16
        pre = precoding.build(M, 0.5)
        H = random_channel(rng, M)
        R = analytic_covariance(H, pre.P, 1.0, 0.5)
        H_est = joint_estimate(R, EstimatorConfig(pre, 1.0, noise_mode="estimated"))
        # Smallest eigenvalue over-estimates the noise a little; the shape is still close.
        assert phase_free_nmse(H_est, H) < 0.05

    def test_sample_convergence(self):
        M = 64
        pre = precoding.build(M, 0.5)
        Rd = CONST.source_covariance(M)
        cfg = EstimatorConfig(pre, CONST.sigma_d2, Rd)
        medians = []
        for N in (10, 100, 1000):
            errs = []
            for t in range(50):
                r = np.random.default_rng([t, N])
                H = random_channel(r, M)
                y = H * precoding.apply(pre, random_frames(CONST, M, N, r))
                est = blind_estimate(y, cfg, phase_pattern(M))
                errs.append(np.sum(np.abs(est.H_estimate - H) ** 2) / np.sum(np.abs(H) ** 2))
            medians.append(np.median(errs))
        assert medians[0] >= medians[1] >= medians[2]


def noiseless_frames(H, rng, n=20, M=64, p=0.5):
    pre = precoding.build(M, p)
    s = precoding.apply(pre, random_frames(CONST, M, n, rng))
    return s, H * s


class TestPhaseAmbiguity:
    M = 64

    def test_injected_phase(self, rng):
        H = random_channel(rng, self.M)
        _, y = noiseless_frames(H, rng)
        phi = estimate_phase_ambiguity(H * np.exp(0.7j), y, phase_pattern(self.M))
        assert phi == pytest.approx(0.7, abs=1e-8)

    def test_zero_phase(self, rng):
        H = random_channel(rng, self.M)
        _, y = noiseless_frames(H, rng)
        assert estimate_phase_ambiguity(H, y, phase_pattern(self.M)) == pytest.approx(0.0, abs=1e-8)

    def test_near_pi_with_noise(self, rng):
        M = self.M
        H = random_channel(rng, M)
        pre = precoding.build(M, 0.5)
        s, y = noiseless_frames(H, rng, n=500)
        power = np.real(np.trace(pre.W @ CONST.source_covariance(M) @ pre.W.T)) / M
        sigma_n2 = power / 10**3
        y = y + np.sqrt(sigma_n2 / 2) * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
        true = np.pi - 0.05
        phi = estimate_phase_ambiguity(H * np.exp(1j * true), y, phase_pattern(M))
        assert phi > 0
        assert abs(phi - true) < 0.02

    def test_unbiased_over_random_phases(self):
        worst = 0.0
        for t in range(200):
            r = np.random.default_rng(t)
            H = random_channel(r, self.M)
            _, y = noiseless_frames(H, r, n=2)
            true = r.uniform(-np.pi, np.pi)
            phi = estimate_phase_ambiguity(H * np.exp(1j * true), y, phase_pattern(self.M))
            worst = max(worst, abs(wrap_angle(phi - true)))
        assert worst < 1e-6

    def test_samples_all_equal_noiseless(self, rng):
        H = random_channel(rng, self.M)
        _, y = noiseless_frames(H, rng, n=3)
        votes = phase_samples(H * np.exp(-1.2j), y, phase_pattern(self.M))
        np.testing.assert_allclose(np.exp(1j * votes), np.exp(-1.2j), atol=1e-10)

    def test_unresolvable(self):
        H = np.ones(2)
        y = np.array([[1.0, -1.0], [-1.0, 1.0]])  # votes 0 and pi with equal weight
        with pytest.raises(AmbiguityUnresolvableError):
            estimate_phase_ambiguity(H, y, phase_pattern(2))


class TestCorrection:
    def test_identity(self, rng):
        H = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        np.testing.assert_array_equal(correct_phase(H, 0.0), H)

    def test_cancels(self, rng):
        H = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        np.testing.assert_allclose(correct_phase(H * np.exp(2.1j), 2.1), H, atol=1e-12)
        np.testing.assert_allclose(np.abs(correct_phase(H, 2.1)), np.abs(H), rtol=1e-15)


class TestPilotBaseline:
    def test_noiseless(self, rng):
        H = random_channel(rng, 64)
        s, y = noiseless_frames(H, rng, n=5)
        phi = pilot_phase_baseline(H * np.exp(-0.4j), y, 0, s[:, 0])
        assert phi == pytest.approx(-0.4, abs=1e-10)
        assert pilot_phase_baseline(H, y[0], 3, s[0, 3]) == pytest.approx(0.0, abs=1e-10)

    def test_invalid(self, rng):
        H = random_channel(rng, 8)
        with pytest.raises(InvalidPilotError):
            pilot_phase_baseline(H, np.ones(8), 8, 1.0)
        with pytest.raises(InvalidPilotError):
            pilot_phase_baseline(H, np.ones(8), 0, 0.0)

    def test_agrees_with_blind_at_high_snr(self, rng):
        M = 64
        pre = precoding.build(M, 0.5)
        Rd = CONST.source_covariance(M)
        H = random_channel(rng, M)
        s, y = noiseless_frames(H, rng, n=500)
        sigma_n2 = np.real(np.trace(pre.W @ Rd @ pre.W.T)) / M / 10**3
        y = y + np.sqrt(sigma_n2 / 2) * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
        cfg = EstimatorConfig(pre, CONST.sigma_d2, Rd, sigma_n2=sigma_n2)
        H_est = joint_estimate(CovarianceAccumulator(M).accumulate(y).finalize(), cfg)
        blind = estimate_phase_ambiguity(H_est, y, phase_pattern(M))
        pilot = pilot_phase_baseline(H_est, y, 0, s[:, 0])
        assert abs(wrap_angle(blind - pilot)) < 0.05
