"""OFDM transmit/receive chain.

Two equivalent paths are provided: the per-subcarrier model
``y_i = H_i s_i + n_i`` and the explicit time-domain chain (IDFT, cyclic
prefix, linear convolution, CP removal, DFT). All functions accept a single
block or a ``(n_blocks, ...)`` batch on the leading axis.
"""

from __future__ import annotations

import numpy as np

from .channel import NoiseSpec, add_awgn, complex_noise
from .errors import CPInsufficiencyError, DimensionError, SingularSubcarrierError
from .numerics import dft, idft


def rx_freq_model(s, H, spec: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if s.shape[-1] != H.shape[-1]:
        raise DimensionError(f"frame length {s.shape[-1]} != channel length {H.shape[-1]}")
    return add_awgn(s * H, spec, rng)


def modulate_time(s, cp_len: int) -> np.ndarray:
    """IDFT of each frame with the last ``cp_len`` samples prepended."""
    if cp_len < 0:
        raise ValueError("cyclic prefix length must be non-negative")
    body = idft(s)
    if cp_len == 0:
        return body
    return np.concatenate([body[..., -cp_len:], body], axis=-1)


def channel_pass_time(x, h, cp_len: int) -> np.ndarray:
    """Linear convolution with ``h``, truncated to the block length.

    Each block is treated on its own; the CP absorbs the channel memory so
    the tail that would spill into the next block is simply dropped.
    """
    x = np.asarray(x, dtype=complex)
    h = np.asarray(h, dtype=complex)
    L = h.shape[-1] - 1
    if cp_len < L:
        raise CPInsufficiencyError(f"cyclic prefix {cp_len} shorter than channel order {L}")
    n = x.shape[-1]
    out = np.zeros_like(x)
    for l, tap in enumerate(h[: n]):
        out[..., l:] += tap * x[..., : n - l]
    return out


def demodulate_time(rx, M: int, cp_len: int) -> np.ndarray:
    rx = np.asarray(rx, dtype=complex)
    if rx.shape[-1] != M + cp_len:
        raise DimensionError(f"expected {M + cp_len} samples, got {rx.shape[-1]}")
    return dft(rx[..., cp_len:], M)


def rx_time_chain(s, h, spec: NoiseSpec, rng: np.random.Generator, cp_len: int) -> np.ndarray:
    """Full time-domain path.

    Time-domain noise has variance ``sigma_n2 / M`` per sample so that after
    the unscaled DFT each subcarrier sees variance ``sigma_n2``, matching
    :func:`rx_freq_model`.
    """
    s = np.asarray(s, dtype=complex)
    M = s.shape[-1]
    x = channel_pass_time(modulate_time(s, cp_len), h, cp_len)
    if spec.sigma_n2 > 0:
        x = x + complex_noise(x.shape, spec.sigma_n2 / M, rng)
    return demodulate_time(x, M, cp_len)


def equalize(y, H_hat) -> np.ndarray:
    """One-tap zero-forcing equalizer ``y_i / H_hat_i``."""
    H_hat = np.asarray(H_hat, dtype=complex)
    small = np.flatnonzero(np.abs(H_hat) < 1e-12)
    if small.size:
        raise SingularSubcarrierError(int(small[0]))
    y = np.asarray(y, dtype=complex)
    if y.shape[-1] != H_hat.shape[-1]:
        raise DimensionError("frame and channel estimate differ in length")
    return y / H_hat
