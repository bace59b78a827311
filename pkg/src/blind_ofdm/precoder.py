"""Non-redundant alternating-sign precoder.

``W = (1 - p) I + p v v^T`` with ``v_i = (-1)^i``: ones on the diagonal and
``p * (-1)^(i+j)`` elsewhere. Because every split frame satisfies
``sign(d_i) = (-1)^i``, ``W d = (1-p) d + p * sum|d| * v`` keeps that sign
pattern, which is what lets the receiver resolve the phase ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import alternating_signs
from .errors import DimensionError, InvalidFrameError, InvalidWeightError


@dataclass(frozen=True)
class Precoder:
    M: int
    p: float
    W: np.ndarray
    P: np.ndarray

    @property
    def min_gram_entry(self) -> float:
        """Smallest ``|P_ij|``, i.e. the off-diagonal magnitude ``2p(1-p) + p^2 M``."""
        return 2 * self.p * (1 - self.p) + self.p**2 * self.M

    @property
    def power_gain(self) -> float:
        """``tr(P) / M``: average transmit power gain for white unit-energy input."""
        return float(np.trace(self.P)) / self.M


def build(M: int, p: float) -> Precoder:
    if M < 2 or M % 2:
        raise InvalidFrameError(f"subcarrier count must be even and >= 2, got {M}")
    if not 0.0 < p < 1.0:
        raise InvalidWeightError(f"precoding weight must lie in (0, 1), got {p}")
    v = alternating_signs(M)
    W = (1.0 - p) * np.eye(M) + p * np.outer(v, v)
    np.fill_diagonal(W, 1.0)
    P = W @ W.T
    off = 2 * p * (1 - p) + p**2 * M
    assert np.min(np.abs(P)) >= off * (1 - 1e-12), "Gram matrix has a vanishing entry"
    return Precoder(M, float(p), W, P)


def _check_len(pre: Precoder, x: np.ndarray) -> None:
    if x.shape[-1] != pre.M:
        raise DimensionError(f"expected length {pre.M}, got {x.shape[-1]}")


def apply(pre: Precoder, d) -> np.ndarray:
    """``s = W d``; ``d`` may be a single frame or a ``(n, M)`` batch."""
    d = np.asarray(d)
    _check_len(pre, d)
    return d @ pre.W.T


def invert_apply(pre: Precoder, s_hat) -> np.ndarray:
    """``W^{-1} s_hat`` via the closed-form rank-one inverse, O(M) per frame."""
    s_hat = np.asarray(s_hat)
    _check_len(pre, s_hat)
    p, M = pre.p, pre.M
    v = alternating_signs(M)
    proj = (s_hat @ v)[..., None] * v
    return (s_hat - p / ((1 - p) + p * M) * proj) / (1 - p)
