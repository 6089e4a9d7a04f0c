"""Image-quality metrics on pure-quaternion frame tensors."""
from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ShapeMismatch, TooSmall
from .quaternion import QTensor

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_L = 255.0


def psnr(truth: QTensor, estimate: QTensor) -> float:
    """``10 log10(n * max|truth|^2 / ||estimate - truth||_F^2)`` in dB.

    ``n`` is the number of quaternion entries; returns ``inf`` when the
    tensors are identical.
    """
    if truth.shape != estimate.shape:
        raise ShapeMismatch(f"shapes differ: {truth.shape} vs {estimate.shape}")
    err = float(np.sum((estimate.data - truth.data) ** 2))
    if err == 0.0:
        return math.inf
    peak = float(truth.modulus().max())
    return 10.0 * math.log10(truth.size * peak**2 / err)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2
    g = np.exp(-(r**2) / (2 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def _filter_valid(img: np.ndarray, win: np.ndarray) -> np.ndarray:
    patches = sliding_window_view(img, win.shape)
    return np.tensordot(patches, win, axes=([-2, -1], [0, 1]))


def ssim_plane(a: np.ndarray, b: np.ndarray, L: float = SSIM_L) -> float:
    """Mean SSIM of two 2-D planes over all fully-contained windows."""
    win = gaussian_window()
    if a.shape[0] < win.shape[0] or a.shape[1] < win.shape[1]:
        raise TooSmall(f"plane {a.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    a = a.astype(np.float64)
    b = b.astype(np.float64)
    c1 = (SSIM_K1 * L) ** 2
    c2 = (SSIM_K2 * L) ** 2
    mu_a = _filter_valid(a, win)
    mu_b = _filter_valid(b, win)
    var_a = _filter_valid(a * a, win) - mu_a**2
    var_b = _filter_valid(b * b, win) - mu_b**2
    cov = _filter_valid(a * b, win) - mu_a * mu_b
    m = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))
    return float(m.mean())


def _frames(T: QTensor):
    # (channel, H, W, frame) over the three imaginary components
    d = T.data[1:]
    return d.reshape(d.shape[:3] + (-1,), order="F")


def ssim(truth: QTensor, estimate: QTensor, data_range: float = SSIM_L) -> float:
    """SSIM averaged over the R/G/B (i/j/k) channels and all frames."""
    return float(np.mean(ssim_per_frame(truth, estimate, data_range)))


def ssim_per_frame(truth: QTensor, estimate: QTensor, data_range: float = SSIM_L) -> np.ndarray:
    if truth.shape != estimate.shape:
        raise ShapeMismatch(f"shapes differ: {truth.shape} vs {estimate.shape}")
    if truth.ndim < 2:
        raise ShapeMismatch("SSIM needs at least two spatial dimensions")
    A = _frames(truth)
    B = _frames(estimate)
    out = np.empty(A.shape[3])
    for t in range(A.shape[3]):
        out[t] = np.mean([ssim_plane(A[c, :, :, t], B[c, :, :, t], data_range) for c in range(3)])
    return out


def psnr_per_frame(truth: QTensor, estimate: QTensor) -> np.ndarray:
    if truth.shape != estimate.shape:
        raise ShapeMismatch(f"shapes differ: {truth.shape} vs {estimate.shape}")
    A = truth.data.reshape(truth.data.shape[:3] + (-1,), order="F")
    B = estimate.data.reshape(A.shape, order="F")
    return np.array([psnr(QTensor._wrap(A[..., t]), QTensor._wrap(B[..., t])) for t in range(A.shape[3])])
