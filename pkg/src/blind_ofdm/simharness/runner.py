"""Monte-Carlo runs and sweeps.

Every run draws its channel from ``(master_seed, run_index)`` alone, so all
sweep points of one run index share a channel, and its data and noise from
``(master_seed, run_index, snr_index, blocks_index)``. Results therefore do
not depend on execution order or worker count.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .. import precoder as precoding
from ..channel import Pdp, noise_var_for_snr, sample_channel
from ..constellation import build_split, decide, phase_pattern, random_frames
from ..errors import BlindOfdmError, RunError, SweepError, UndefinedMetricError
from ..estimator import (
    CovarianceAccumulator,
    EstimatorConfig,
    correct_phase,
    estimate_phase_ambiguity,
    joint_estimate,
    pilot_phase_baseline,
)
from ..numerics import wrap_angle
from ..ofdm import equalize, rx_freq_model, rx_time_chain
from .config import SimConfig

log = logging.getLogger(__name__)

SER_FRAMES = 100
PILOT_INDEX = 0


@dataclass(frozen=True)
class RunResult:
    run: int
    snr_db: float
    n_blocks: int
    mode: str
    pdp: str
    nmse: float
    phase_error: float
    ser: float
    elapsed_s: float

    def sort_key(self):
        return (self.snr_db, self.n_blocks, self.run)


@dataclass(frozen=True)
class RunDetail:
    """Everything a single run produced, for callers that need more than metrics."""

    result: RunResult
    H: np.ndarray
    H_est: np.ndarray
    phi_est: float
    H_estimate: np.ndarray
    sigma_n2: float


def nmse(H_hat, H) -> float:
    """``||H_hat - H||^2 / ||H||^2``."""
    H_hat = np.asarray(H_hat, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if H_hat.shape != H.shape:
        raise ValueError("estimate and truth differ in shape")
    energy = float(np.sum(np.abs(H) ** 2))
    if energy == 0:
        raise UndefinedMetricError("true channel has zero energy")
    return float(np.sum(np.abs(H_hat - H) ** 2)) / energy


def _rngs(cfg: SimConfig, run_index: int, snr_index: int, blocks_index: int):
    seed = cfg.master_seed
    channel_rng = np.random.default_rng(np.random.SeedSequence([seed, 0, run_index]))
    data_rng = np.random.default_rng(np.random.SeedSequence([seed, 1, run_index, snr_index, blocks_index]))
    return channel_rng, data_rng


def simulate_run(cfg: SimConfig, run_index: int, snr_index: int = 0, blocks_index: int = 0) -> RunDetail:
    start = time.perf_counter()
    snr_db = cfg.snr_db[snr_index]
    n_blocks = cfg.n_blocks[blocks_index]
    channel_rng, rng = _rngs(cfg, run_index, snr_index, blocks_index)

    const = build_split(cfg.Q)
    pre = precoding.build(cfg.M, cfg.p)
    source_cov = const.source_covariance(cfg.M) if cfg.source_model == "split" else None
    ch = sample_channel(Pdp(cfg.pdp, cfg.L), cfg.M, channel_rng, cfg.channel_mode, cfg.normalize)
    noise = noise_var_for_snr(snr_db, pre, const.sigma_d2, source_cov)
    cp_len = cfg.resolved_cp_len

    def transmit(n):
        s = precoding.apply(pre, random_frames(const, cfg.M, n, rng))
        if cfg.path == "freq":
            y = rx_freq_model(s, ch.H, noise, rng)
        else:
            y = rx_time_chain(s, ch.h, noise, rng, cp_len)
        return s, y

    s, y = transmit(n_blocks)
    est_cfg = EstimatorConfig(
        pre, const.sigma_d2, source_cov,
        noise_mode=cfg.noise_mode, sigma_n2=noise.sigma_n2, denoise_taps=cfg.denoise_taps,
    )
    R_hat = CovarianceAccumulator(cfg.M).accumulate(y).finalize()
    H_est = joint_estimate(R_hat, est_cfg)

    phi_true = float(np.angle(np.vdot(ch.H, H_est)))
    if cfg.mode == "blind":
        phi_est = estimate_phase_ambiguity(H_est, y, phase_pattern(cfg.M))
    elif cfg.mode == "semiblind":
        phi_est = pilot_phase_baseline(H_est, y, PILOT_INDEX, s[:, PILOT_INDEX])
    else:
        phi_est = phi_true
    H_estimate = correct_phase(H_est, phi_est)

    d_fresh = random_frames(const, cfg.M, SER_FRAMES, rng)
    s_fresh = precoding.apply(pre, d_fresh)
    if cfg.path == "freq":
        y_fresh = rx_freq_model(s_fresh, ch.H, noise, rng)
    else:
        y_fresh = rx_time_chain(s_fresh, ch.h, noise, rng, cp_len)
    d_hat = precoding.invert_apply(pre, equalize(y_fresh, H_estimate))
    ser = float(np.mean(decide(d_hat, cfg.Q) != decide(d_fresh, cfg.Q)))

    result = RunResult(
        run=run_index,
        snr_db=snr_db,
        n_blocks=n_blocks,
        mode=cfg.mode,
        pdp=cfg.pdp,
        nmse=nmse(H_estimate, ch.H),
        phase_error=wrap_angle(phi_est - phi_true),
        ser=ser,
        elapsed_s=time.perf_counter() - start,
    )
    return RunDetail(result, ch.H, H_est, phi_est, H_estimate, noise.sigma_n2)


def run_single(cfg: SimConfig, run_index: int, snr_index: int = 0, blocks_index: int = 0) -> RunResult:
    try:
        return simulate_run(cfg, run_index, snr_index, blocks_index).result
    except BlindOfdmError as exc:
        raise RunError(run_index, cfg.snr_db[snr_index], cfg.n_blocks[blocks_index], exc) from exc


def _task(args):
    cfg, run_index, si, bi = args
    try:
        return run_single(cfg, run_index, si, bi)
    except RunError as exc:
        return exc


def sweep(cfg: SimConfig, workers: int = 1) -> list[RunResult]:
    """All runs over ``snr_db x n_blocks x runs``, sorted by (snr, blocks, run)."""
    tasks = [
        (cfg, r, si, bi)
        for si, bi, r in product(range(len(cfg.snr_db)), range(len(cfg.n_blocks)), range(cfg.runs))
    ]
    log.info("sweep: %d runs on %d worker(s)", len(tasks), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = [_task(t) for t in tasks]
    failures = [o for o in outcomes if isinstance(o, RunError)]
    if failures:
        raise SweepError(failures)
    return sorted(outcomes, key=RunResult.sort_key)
