"""Built-in consistency checks run by ``blind-ofdm selftest``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import precoder as precoding
from .channel import NoiseSpec, Pdp, sample_channel
from .constellation import build_split, phase_pattern, random_frames
from .estimator import EstimatorConfig, analytic_covariance, correct_phase, estimate_phase_ambiguity, joint_estimate
from .ofdm import rx_freq_model, rx_time_chain
from .simharness.runner import nmse


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def exact_covariance_check(trials: int = 20, M: int = 64, L: int = 2, seed: int = 0) -> CheckResult:
    """Exact model covariance in, channel out (after blind phase correction)."""
    rng = np.random.default_rng(seed)
    const = build_split(8)
    pre = precoding.build(M, 0.5)
    cfg = EstimatorConfig(pre, const.sigma_d2)
    worst = 0.0
    for t in range(trials):
        pdp = Pdp("exponential" if t % 2 == 0 else "uniform", L)
        H = sample_channel(pdp, M, rng).H
        R = analytic_covariance(H, pre.P, const.sigma_d2, 0.0)
        H_est = joint_estimate(R, cfg)
        y = precoding.apply(pre, random_frames(const, M, 4, rng)) * H
        phi = estimate_phase_ambiguity(H_est, y, phase_pattern(M))
        worst = max(worst, nmse(correct_phase(H_est, phi), H))
    return CheckResult("exact-covariance recovery", worst < 1e-10, f"worst NMSE {worst:.3e}")


def chain_equivalence_check(trials: int = 20, M: int = 64, L: int = 2, seed: int = 1) -> CheckResult:
    """Time-domain chain against the per-subcarrier model, noiseless."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    silent = NoiseSpec(0.0)
    for _ in range(trials):
        ch = sample_channel(Pdp("uniform", L), M, rng, mode="rayleigh")
        s = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        a = rx_time_chain(s, ch.h, silent, rng, L)
        b = rx_freq_model(s, ch.H, silent, rng)
        worst = max(worst, float(np.linalg.norm(a - b) / np.linalg.norm(b)))
    return CheckResult("time/frequency chain equivalence", worst < 1e-9, f"worst relative error {worst:.3e}")


def run_all() -> list[CheckResult]:
    return [exact_covariance_check(), chain_equivalence_check()]
