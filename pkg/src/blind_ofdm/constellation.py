"""Split PAM constellations: right half on even subcarriers, left half on odd.

Levels are the unnormalized odd integers. For an order-``Q`` PAM the right
subset is ``1, 3, ..., Q-1`` and the left subset is the same base
constellation shifted down by ``Q``, i.e. ``-(Q-1), ..., -1`` in ascending
order. Both subsets share one Gray labelling on their ascending index, so the
bit group ``00`` maps to ``+1`` on an even subcarrier and ``-(Q-1)`` on an odd one.

Each subcarrier carries ``log2(Q) - 1`` bits; with ``Q = 2`` the frame is
the fixed pattern ``+1, -1, +1, ...`` and carries no payload.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidFrameError, InvalidOrderError, LengthError


def _gray(i):
    return i ^ (i >> 1)


def _gray_inverse(g):
    g = np.asarray(g).copy()
    shift = g >> 1
    while np.any(shift):
        g ^= shift
        shift >>= 1
    return g


def _check_frame_size(M: int) -> None:
    if M < 2 or M % 2:
        raise InvalidFrameError(f"subcarrier count must be even and >= 2, got {M}")


@dataclass(frozen=True)
class SplitConstellation:
    order: int
    right_subset: np.ndarray
    left_subset: np.ndarray
    sigma_d2: float

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order)) - 1

    @property
    def mean_magnitude(self) -> float:
        """Expected ``|d_i|``; the per-subcarrier symbol mean is ``(-1)^i`` times this."""
        return float(np.mean(self.right_subset))

    def subset(self, index: int) -> np.ndarray:
        return self.right_subset if index % 2 == 0 else self.left_subset

    def source_covariance(self, M: int) -> np.ndarray:
        """Second moment ``E{d d^H}`` of a frame with i.i.d. uniform labels.

        The split subsets give each subcarrier a nonzero mean ``(-1)^i * mu``,
        so the matrix is ``(sigma_d2 - mu^2) I + mu^2 v v^T`` with
        ``v_i = (-1)^i`` rather than a scaled identity.
        """
        _check_frame_size(M)
        v = alternating_signs(M)
        mu = self.mean_magnitude
        return (self.sigma_d2 - mu**2) * np.eye(M) + mu**2 * np.outer(v, v)


def alternating_signs(M: int) -> np.ndarray:
    return (-1.0) ** np.arange(M)


def build_split(Q: int) -> SplitConstellation:
    if not isinstance(Q, (int, np.integer)) or Q < 2 or Q & (Q - 1):
        raise InvalidOrderError(f"PAM order must be a power of two >= 2, got {Q!r}")
    right = np.arange(1, Q, 2, dtype=float)
    left = right - Q
    full = np.concatenate([left, right])
    return SplitConstellation(int(Q), right, left, float(np.mean(full**2)))


def phase_pattern(M: int) -> np.ndarray:
    """Alternating ``0, pi, 0, pi, ...`` phase signature of a split frame."""
    _check_frame_size(M)
    return np.where(np.arange(M) % 2 == 0, 0.0, np.pi)


def _levels_table(const: SplitConstellation, M: int) -> np.ndarray:
    # Row 0: right subset, row 1: left subset; pick by subcarrier parity.
    table = np.stack([const.right_subset, const.left_subset])
    return table[np.arange(M) % 2]


def map_bits(bits, Q: int, M: int) -> np.ndarray:
    """Map ``M * (log2(Q) - 1)`` bits (MSB first per group) onto one split frame.

    Also accepts a 2-D array with one row per frame.
    """
    const = build_split(Q)
    _check_frame_size(M)
    k = const.bits_per_symbol
    bits = np.asarray(bits, dtype=np.int64)
    batch = bits.ndim == 2
    bits = np.atleast_2d(bits) if bits.size or batch else bits.reshape(1, 0)
    if bits.shape[-1] != M * k:
        raise LengthError(f"expected {M * k} bits per frame, got {bits.shape[-1]}")
    if k == 0:
        labels = np.zeros((bits.shape[0], M), dtype=np.int64)
    else:
        groups = bits.reshape(bits.shape[0], M, k)
        labels = groups @ (1 << np.arange(k - 1, -1, -1))
    idx = _gray_inverse(labels)
    d = _levels_table(const, M)[np.arange(M), idx]
    return d if batch else d[0]


def decide(d_hat, Q: int) -> np.ndarray:
    """Nearest-level decision in the parity-appropriate subset; returns subset indices."""
    const = build_split(Q)
    d_hat = np.asarray(d_hat)
    M = d_hat.shape[-1]
    levels = _levels_table(const, M)
    dist = np.abs(np.real(d_hat)[..., None] - levels)
    return np.argmin(dist, axis=-1)


def demap(d_hat, Q: int) -> np.ndarray:
    """Hard-decision demapper, inverse of :func:`map_bits` on noiseless input."""
    const = build_split(Q)
    k = const.bits_per_symbol
    idx = decide(d_hat, Q)
    labels = _gray(idx)
    shifts = np.arange(k - 1, -1, -1)
    bits = (labels[..., None] >> shifts) & 1
    return bits.reshape(bits.shape[:-2] + (-1,)).astype(np.int8)


def random_frames(const: SplitConstellation, M: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` frames with uniform labels, shape ``(n, M)``."""
    _check_frame_size(M)
    half = const.order // 2
    idx = rng.integers(0, half, size=(n, M))
    return _levels_table(const, M)[np.arange(M), idx]
