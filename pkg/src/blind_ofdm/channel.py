"""Random multipath channels and calibrated complex AWGN."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import CPInsufficiencyError, DimensionError
from .numerics import dft
from .precoder import Precoder

PdpKind = Literal["exponential", "uniform"]
ChannelMode = Literal["fixed_magnitude", "rayleigh"]


@dataclass(frozen=True)
class Pdp:
    kind: PdpKind
    L: int

    def __post_init__(self):
        if self.kind not in ("exponential", "uniform"):
            raise ValueError(f"unknown power delay profile {self.kind!r}")
        if self.L < 0:
            raise ValueError("channel order must be non-negative")

    def powers(self) -> np.ndarray:
        """Expected tap energies ``E{|h_l|^2}``, l = 0..L."""
        l = np.arange(self.L + 1)
        if self.kind == "exponential":
            return np.exp(-l / 10.0)
        return np.ones(self.L + 1)


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    H: np.ndarray
    scale: float


@dataclass(frozen=True)
class NoiseSpec:
    sigma_n2: float

    def __post_init__(self):
        if self.sigma_n2 < 0:
            raise ValueError("noise variance must be non-negative")


def sample_channel(pdp: Pdp, M: int, rng: np.random.Generator,
                   mode: ChannelMode = "fixed_magnitude", normalize: bool = True) -> ChannelRealization:
    """Draw taps ``h`` and their M-point response.

    ``fixed_magnitude`` gives ``|h_l|^2 = PDP(l)`` exactly with uniform phase;
    ``rayleigh`` draws circular complex Gaussian taps of variance ``PDP(l)``.
    With ``normalize`` the total (expected, for Rayleigh) tap energy is one.
    """
    powers = pdp.powers()
    n = pdp.L + 1
    if mode == "fixed_magnitude":
        h = np.sqrt(powers) * np.exp(2j * np.pi * rng.random(n))
        scale = 1.0 / np.sqrt(np.sum(np.abs(h) ** 2)) if normalize else 1.0
    elif mode == "rayleigh":
        g = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        h = np.sqrt(powers) * g
        scale = 1.0 / np.sqrt(np.sum(powers)) if normalize else 1.0
    else:
        raise ValueError(f"unknown channel mode {mode!r}")
    h = h * scale
    return ChannelRealization(h, freq_response(h, M), float(scale))


def freq_response(h, M: int) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape[-1] > M:
        raise CPInsufficiencyError(f"{h.shape[-1]} taps do not fit a {M}-subcarrier frame")
    return dft(h, M)


def transmit_power(pre: Precoder, sigma_d2: float, source_cov=None) -> float:
    """Average per-subcarrier power of ``s = W d``.

    ``source_cov`` is ``E{d d^H}``; when omitted the source is taken as white
    with energy ``sigma_d2`` and the result is ``sigma_d2 * tr(P) / M``.
    """
    if source_cov is None:
        return sigma_d2 * pre.power_gain
    source_cov = np.asarray(source_cov)
    if source_cov.shape != (pre.M, pre.M):
        raise DimensionError("source covariance does not match the precoder size")
    return float(np.real(np.trace(pre.W @ source_cov @ pre.W.T))) / pre.M


def noise_var_for_snr(snr_db: float, pre: Precoder, sigma_d2: float, source_cov=None) -> NoiseSpec:
    """Noise variance giving the requested transmit SNR on a unit-energy channel."""
    if not np.isfinite(snr_db):
        raise ValueError("SNR must be finite")
    return NoiseSpec(transmit_power(pre, sigma_d2, source_cov) / 10 ** (snr_db / 10.0))


def complex_noise(shape, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    std = np.sqrt(sigma2 / 2.0)
    return std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def add_awgn(y, spec: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    if spec.sigma_n2 == 0:
        return y.copy()
    return y + complex_noise(y.shape, spec.sigma_n2, rng)
