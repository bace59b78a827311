"""Blind channel estimation from second-order statistics.

Pipeline for a window of received frames ``y``:

1. average ``y y^H`` into a sample covariance ``R``;
2. undo the precoder's correlation element-wise: for a source with second
   moment ``R_d``, ``R = (H H^H) * (W R_d W^H) + sigma_n2 I`` (``*`` is the
   Hadamard product), so ``(R - sigma_n2 I) / (W R_d W^H)`` estimates the
   rank-one matrix ``H H^H``;
3. its dominant eigenpair ``(lam, u)`` gives ``sqrt(lam) u = H exp(j phi)``
   for one unknown rotation ``phi``;
4. the split constellation fixes the transmitted phase of subcarrier ``i``
   to ``0`` (even) or ``pi`` (odd), so every received sample votes for
   ``phi``; the votes are combined with a magnitude-weighted circular mean
   and the rotation is removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import (
    AmbiguityUnresolvableError,
    DegenerateCovarianceError,
    DimensionError,
    GramSingularityError,
    InvalidPilotError,
    NotHermitianError,
    UndefinedMeanError,
)
from .numerics import check_hermitian, circular_mean, dominant_eigpair, wrap_angle
from .precoder import Precoder

NoiseMode = Literal["known", "estimated"]


class CovarianceAccumulator:
    """Running sum of ``y y^H`` over received frames.

    Accumulators fed from disjoint streams can be combined with :meth:`merge`.
    """

    def __init__(self, M: int):
        self.M = M
        self.total = np.zeros((M, M), dtype=complex)
        self.count = 0

    def accumulate(self, y) -> "CovarianceAccumulator":
        y = np.atleast_2d(np.asarray(y, dtype=complex))
        if y.shape[-1] != self.M:
            raise DimensionError(f"frame length {y.shape[-1]} != {self.M}")
        self.total += y.T @ y.conj()
        self.count += y.shape[0]
        return self

    def merge(self, other: "CovarianceAccumulator") -> "CovarianceAccumulator":
        if other.M != self.M:
            raise DimensionError("cannot merge accumulators of different size")
        self.total += other.total
        self.count += other.count
        return self

    def finalize(self) -> np.ndarray:
        if self.count == 0:
            raise DegenerateCovarianceError("no frames accumulated")
        R = self.total / self.count
        R = 0.5 * (R + R.conj().T)
        scale = max(float(np.max(np.abs(R))), 1e-300)
        if np.min(np.linalg.eigvalsh(R)) < -1e-10 * scale:
            raise NotHermitianError("sample covariance is not positive semi-definite")
        return R


def analytic_covariance(H, P, sigma_d2: float, sigma_n2: float) -> np.ndarray:
    """Model covariance ``sigma_d2 (H H^H) * P + sigma_n2 I``.

    ``P`` may be any transmit Gram matrix; passing ``W R_d W^H`` with
    ``sigma_d2 = 1`` covers a non-white source.
    """
    H = np.asarray(H, dtype=complex)
    P = np.asarray(P)
    if P.shape != (H.size, H.size):
        raise DimensionError("Gram matrix does not match channel length")
    return sigma_d2 * np.outer(H, H.conj()) * P + sigma_n2 * np.eye(H.size)


@dataclass
class EstimatorConfig:
    """Receiver-side knowledge used by :func:`joint_estimate`.

    ``source_cov`` is the source second moment ``E{d d^H}``; ``None`` means a
    white source of energy ``sigma_d2``. For split constellations pass
    ``SplitConstellation.source_covariance(M)``, since the split subsets
    have a nonzero per-subcarrier mean.
    """

    precoder: Precoder
    sigma_d2: float
    source_cov: np.ndarray | None = None
    noise_mode: NoiseMode = "known"
    sigma_n2: float = 0.0
    denoise_taps: int | None = None
    min_gram_entry: float | None = None

    def __post_init__(self):
        if self.sigma_d2 <= 0:
            raise ValueError("source energy must be positive")
        if self.noise_mode not in ("known", "estimated"):
            raise ValueError(f"unknown noise mode {self.noise_mode!r}")
        if self.denoise_taps is not None and not 1 <= self.denoise_taps <= self.precoder.M:
            raise ValueError("denoise_taps must lie in [1, M]")

    @property
    def gram(self) -> np.ndarray:
        """Transmit Gram ``E{s s^H} = W R_d W^H`` (``sigma_d2 P`` for white input)."""
        if self.source_cov is None:
            return self.sigma_d2 * self.precoder.P
        W = self.precoder.W
        return W @ np.asarray(self.source_cov) @ W.T


@dataclass
class ChannelEstimate:
    H_est: np.ndarray
    phi_est: float
    H_estimate: np.ndarray
    phase_samples: np.ndarray = field(repr=False)


def _project_time_support(H: np.ndarray, taps: int) -> np.ndarray:
    # Orthogonal projection onto span of the first `taps` DFT columns: F F^H / M.
    M = H.size
    F = np.exp(-2j * np.pi * np.outer(np.arange(M), np.arange(taps)) / M)
    return F @ (F.conj().T @ H) / M


def joint_estimate(R_hat, cfg: EstimatorConfig) -> np.ndarray:
    """Channel response up to one global phase, from the sample covariance."""
    R_hat = check_hermitian(R_hat)
    M = cfg.precoder.M
    if R_hat.shape != (M, M):
        raise DimensionError(f"covariance is {R_hat.shape}, precoder expects {M}x{M}")
    gram = cfg.gram
    threshold = cfg.min_gram_entry
    if threshold is None:
        threshold = 1e-6 * float(np.max(np.abs(gram)))
    if np.min(np.abs(gram)) < threshold:
        raise GramSingularityError("transmit Gram matrix has near-zero entries")

    if cfg.noise_mode == "known":
        sigma_n2 = cfg.sigma_n2
    else:
        # Heuristic: exact only when the noiseless covariance is singular.
        sigma_n2 = max(float(np.linalg.eigvalsh(R_hat)[0]), 0.0)

    G = (R_hat - sigma_n2 * np.eye(M)) / gram
    lam, u = dominant_eigpair(G)
    if lam <= 0:
        raise DegenerateCovarianceError(
            f"dominant eigenvalue {lam:.3e} is not positive; too few frames or noise overestimated"
        )
    H_est = np.sqrt(lam) * u
    if cfg.denoise_taps is not None:
        H_est = _project_time_support(H_est, cfg.denoise_taps)
    return H_est


def phase_samples(H_est, frames, B) -> np.ndarray:
    """Per-sample ambiguity votes ``angle(H_est_i) - angle(y_i) + B_i``, wrapped."""
    H_est = np.asarray(H_est, dtype=complex)
    y = np.atleast_2d(np.asarray(frames, dtype=complex))
    B = np.asarray(B, dtype=float)
    if y.shape[-1] != H_est.size or B.size != H_est.size:
        raise DimensionError("frames, estimate and phase pattern differ in length")
    return wrap_angle(np.angle(H_est)[None, :] - np.angle(y) + B[None, :])


def estimate_phase_ambiguity(H_est, frames, B) -> float:
    """Blind estimate of the global rotation left in ``H_est``.

    Each vote is weighted by ``|y_i|`` so faded subcarriers, whose phase is
    mostly noise, count for less. Noiseless votes are all equal and the
    weighting has no effect.
    """
    y = np.atleast_2d(np.asarray(frames, dtype=complex))
    if y.shape[0] == 0:
        raise ValueError("at least one frame is required")
    votes = phase_samples(H_est, y, B)
    try:
        return circular_mean(votes, np.abs(y))
    except UndefinedMeanError as exc:
        raise AmbiguityUnresolvableError(str(exc)) from exc


def correct_phase(H_est, phi_est: float) -> np.ndarray:
    return np.asarray(H_est, dtype=complex) * np.exp(-1j * phi_est)


def pilot_phase_baseline(H_est, y, pilot_index: int, pilot_symbol_s) -> float:
    """Semi-blind rotation estimate from a known symbol on one subcarrier.

    ``y`` may hold several frames, with ``pilot_symbol_s`` giving the known
    transmitted symbol of each; the per-frame estimates are circularly
    averaged.
    """
    H_est = np.asarray(H_est, dtype=complex)
    y = np.atleast_2d(np.asarray(y, dtype=complex))
    if not 0 <= pilot_index < H_est.size:
        raise InvalidPilotError(f"pilot index {pilot_index} out of range")
    s = np.broadcast_to(np.asarray(pilot_symbol_s, dtype=complex), (y.shape[0],))
    if np.any(np.abs(s) == 0):
        raise InvalidPilotError("pilot symbol has zero energy")
    votes = np.angle(H_est[pilot_index]) - np.angle(y[:, pilot_index] / s)
    try:
        return circular_mean(votes)
    except UndefinedMeanError as exc:
        raise AmbiguityUnresolvableError(str(exc)) from exc


def blind_estimate(frames, cfg: EstimatorConfig, B) -> ChannelEstimate:
    """Covariance, joint estimate and blind phase correction in one call."""
    y = np.atleast_2d(np.asarray(frames, dtype=complex))
    R_hat = CovarianceAccumulator(cfg.precoder.M).accumulate(y).finalize()
    H_est = joint_estimate(R_hat, cfg)
    phi = estimate_phase_ambiguity(H_est, y, B)
    return ChannelEstimate(H_est, phi, correct_phase(H_est, phi), phase_samples(H_est, y, B))
