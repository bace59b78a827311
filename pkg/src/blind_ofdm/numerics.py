"""Numeric kernels shared by the transceiver and the estimator.

The forward DFT is the unscaled one, ``X_k = sum_n x_n exp(-2j*pi*k*n/M)``;
``idft`` carries the ``1/M`` factor so the pair round-trips exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DimensionError, NotHermitianError, UndefinedMeanError

HERMITIAN_RTOL = 1e-12


def dft(x, M: int) -> np.ndarray:
    """M-point forward DFT along the last axis, zero-padding short input."""
    x = np.asarray(x, dtype=complex)
    if M < 1:
        raise DimensionError(f"DFT size must be positive, got {M}")
    if x.shape[-1] > M:
        raise DimensionError(f"input length {x.shape[-1]} exceeds DFT size {M}")
    return np.fft.fft(x, n=M, axis=-1)


def idft(X, M: int | None = None) -> np.ndarray:
    """Inverse of :func:`dft` (scaled by ``1/M``) along the last axis."""
    X = np.asarray(X, dtype=complex)
    return np.fft.ifft(X, n=M, axis=-1)


def check_hermitian(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {A.shape}")
    scale = np.max(np.abs(A))
    if scale > 0 and np.max(np.abs(A - A.conj().T)) > HERMITIAN_RTOL * scale:
        raise NotHermitianError("matrix is not conjugate-symmetric")
    return A


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    if np.abs(v[k]) == 0:
        return v
    v = v * (np.abs(v[k]) / v[k])
    v[k] = np.abs(v[k])
    return v


def _power_iterate(B: np.ndarray, A: np.ndarray, v: np.ndarray, scale: float,
                   max_iter: int, rtol: float):
    # Iterates on B but reports Rayleigh quotients and residuals of A.
    lam_prev = np.inf
    residual = np.inf
    for _ in range(max_iter):
        w = B @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, v, 0.0, True
        v = w / norm
        Av = A @ v
        lam = float(np.real(np.vdot(v, Av)))
        residual = float(np.linalg.norm(Av - lam * v))
        if abs(lam - lam_prev) <= rtol * scale and residual <= 1e-12 * scale:
            return lam, v, residual, True
        lam_prev = lam
    return lam_prev, v, residual, False


def dominant_eigpair(A, max_iter: int = 10_000, rtol: float = 1e-13) -> tuple[float, np.ndarray]:
    """Largest (algebraic) eigenvalue of a Hermitian matrix and its unit eigenvector.

    Plain power iteration is tried first. It converges to the eigenvalue of
    largest magnitude, so when that one turns out negative (or the iteration
    stalls on a +/- pair) the matrix is shifted by a Gershgorin bound, which
    makes it positive semi-definite without changing the eigenvectors.

    The returned vector is normalized so that its largest-magnitude entry is
    real and positive.
    """
    A = check_hermitian(A)
    n = A.shape[0]
    scale = float(np.max(np.sum(np.abs(A), axis=1)))  # >= spectral norm
    if scale == 0.0:
        e = np.zeros(n, dtype=complex)
        e[0] = 1.0
        return 0.0, e

    cols = np.linalg.norm(A, axis=0)
    v0 = A[:, int(np.argmax(cols))].copy()
    # Column start is in range(A); nudge it so it cannot be orthogonal to the target.
    v0 = v0 / np.linalg.norm(v0) + 1e-3 * np.ones(n) / np.sqrt(n)
    v0 /= np.linalg.norm(v0)

    lam, v, residual, ok = _power_iterate(A, A, v0, scale, max_iter // 2, rtol)
    if not ok or lam < 0:
        B = A + scale * np.eye(n)
        lam, v, residual, ok = _power_iterate(B, A, v0, scale, max_iter - max_iter // 2, rtol)
        if not ok:
            raise ConvergenceError("power iteration did not converge", residual)
    return lam, _canonical_phase(v)


def wrap_angle(theta):
    """Wrap angles into (-pi, pi]."""
    out = np.angle(np.exp(1j * np.asarray(theta, dtype=float)))
    out = np.where(out <= -np.pi, np.pi, out)
    return float(out) if np.ndim(out) == 0 else out


def circular_mean(angles, weights=None) -> float:
    """Weighted circular mean ``arg(sum w * exp(j*theta))`` in (-pi, pi]."""
    angles = np.asarray(angles, dtype=float).ravel()
    if weights is None:
        weights = np.ones_like(angles)
    weights = np.asarray(weights, dtype=float).ravel()
    if angles.shape != weights.shape:
        raise DimensionError("angles and weights differ in length")
    if np.any(weights < 0):
        raise ValueError("weights must be non-negative")
    if not np.any(weights > 0):
        raise UndefinedMeanError("all weights are zero")
    resultant = np.sum(weights * np.exp(1j * angles))
    if abs(resultant) < 1e-12 * max(1.0, float(np.sum(weights))):
        raise UndefinedMeanError("resultant vector vanishes; mean direction undefined")
    return wrap_angle(np.angle(resultant))
