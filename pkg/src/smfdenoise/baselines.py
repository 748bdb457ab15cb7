"""Classical comparison filters: Gaussian, average, adaptive Wiener, non-local means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .lattice import Raster

__all__ = [
    "FilterConfig",
    "gaussian_kernel",
    "gaussian_filter",
    "average_filter",
    "wiener_filter",
    "nlm_filter",
]


@dataclass
class FilterConfig:
    gaussian_sigma: float = 1.0
    gaussian_size: int = 5
    average_size: int = 3
    wiener_size: int = 5
    nlm_patch: int = 5
    nlm_search: int = 11
    nlm_h: float = 0.1

    def validate(self):
        for name in ("gaussian_size", "average_size", "wiener_size", "nlm_patch", "nlm_search"):
            v = getattr(self, name)
            if v < 3 or v % 2 == 0:
                raise ValueError(f"{name} must be odd and >= 3, got {v}")
        for name in ("gaussian_sigma", "nlm_h"):
            v = getattr(self, name)
            if not (v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        return self


def _check_odd(size: int, name: str = "size"):
    if size < 3 or size % 2 == 0:
        raise ValueError(f"{name} must be odd and >= 3, got {size}")


def gaussian_kernel(sigma: float, size: int) -> np.ndarray:
    """Normalized sampled isotropic Gaussian on a size x size grid."""
    _check_odd(size)
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    half = size // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma ** 2))
    return g / g.sum()


def gaussian_filter(y: Raster, sigma: float = 1.0, size: int = 5) -> Raster:
    """Convolution with a normalized Gaussian kernel, edge-replicated borders."""
    k = gaussian_kernel(sigma, size)
    out = ndimage.convolve(y.to_2d(), k, mode="nearest")
    return Raster.from_2d(out)


def average_filter(y: Raster, size: int = 3) -> Raster:
    """Convolution with a uniform kernel, edge-replicated borders."""
    _check_odd(size)
    k = np.full((size, size), 1.0 / (size * size))
    out = ndimage.convolve(y.to_2d(), k, mode="nearest")
    return Raster.from_2d(out)


def wiener_filter(y: Raster, size: int = 5) -> Raster:
    """Per-pixel adaptive Wiener filter.

    Local mean and population variance over a size x size window
    (edge-replicated); the noise floor is the mean of all local variances.
    Output is mu + gain * (y - mu) with gain = max(var - floor, 0) /
    max(var, floor); fully degenerate windows pass the local mean through.
    """
    _check_odd(size)
    x = y.to_2d()
    mu = ndimage.uniform_filter(x, size, mode="nearest")
    m2 = ndimage.uniform_filter(x * x, size, mode="nearest")
    var = np.maximum(m2 - mu * mu, 0.0)
    floor = var.mean()
    denom = np.maximum(var, floor)
    safe = np.where(denom > 0.0, denom, 1.0)
    gain = np.where(denom > 0.0, np.maximum(var - floor, 0.0) / safe, 0.0)
    return Raster.from_2d(mu + gain * (x - mu))


def nlm_filter(y: Raster, patch: int = 5, search: int = 11, h: float = 0.1) -> Raster:
    """Non-local means with Gaussian-of-SSD weights.

    Patches are taken from an edge-replicated padding of the image; for each
    offset within the search window the patch SSD map is computed by a box
    sum of the squared shifted difference, and the output is the
    weight-normalized average exp(-SSD / h^2) over all offsets (the zero
    offset included with weight 1).
    """
    _check_odd(patch, "patch")
    _check_odd(search, "search")
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    x = y.to_2d()
    n1, n2 = x.shape
    ph = patch // 2
    sh = search // 2
    pad = ph + sh
    xp = np.pad(x, pad, mode="edge")
    num = np.zeros((n1, n2))
    den = np.zeros((n1, n2))
    h2 = h * h
    # center block of xp, with a ph-halo for the patch box sums
    base = xp[sh:sh + n1 + 2 * ph, sh:sh + n2 + 2 * ph]
    for dr in range(-sh, sh + 1):
        for dc in range(-sh, sh + 1):
            shifted = xp[sh + dr:sh + dr + n1 + 2 * ph, sh + dc:sh + dc + n2 + 2 * ph]
            diff2 = (base - shifted) ** 2
            ssd = ndimage.uniform_filter(diff2, patch, mode="constant")[ph:ph + n1, ph:ph + n2]
            ssd *= patch * patch
            w = np.exp(-ssd / h2)
            num += w * shifted[ph:ph + n1, ph:ph + n2]
            den += w
    return Raster.from_2d(num / den)
