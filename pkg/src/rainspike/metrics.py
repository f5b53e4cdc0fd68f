"""Y-channel image quality metrics: PSNR and single-scale SSIM computed on
the luma plane of YCbCr (BT.601 full-range)."""

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .validation import check_image_u8, check_same_shape

PSNR_CAP_DB = 100.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
DYNAMIC_RANGE = 255.0


@dataclass(frozen=True)
class MetricReport:
    psnr_db: float
    ssim: float


def rgb_to_y(image):
    """BT.601 full-range luma: 0.299 R + 0.587 G + 0.114 B."""
    img = check_image_u8(image, "image").astype(np.float64)
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def psnr_y(a, b):
    """PSNR in dB between the Y channels; identical inputs cap at 100 dB."""
    ya, yb = rgb_to_y(a), rgb_to_y(b)
    check_same_shape(ya, yb, "ref", "test")
    mse = np.mean((ya - yb) ** 2)
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(DYNAMIC_RANGE**2 / mse), PSNR_CAP_DB)


def _gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    half = size // 2
    g = np.exp(-np.arange(-half, half + 1) ** 2 / (2.0 * sigma**2))
    g /= g.sum()
    return np.outer(g, g)


def ssim_y(a, b):
    """Single-scale SSIM on the Y channels.

    11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, L = 255,
    averaged over valid (fully covered) window positions.
    """
    ya, yb = rgb_to_y(a), rgb_to_y(b)
    check_same_shape(ya, yb, "ref", "test")
    if min(ya.shape) < SSIM_WINDOW:
        raise ValueError(f"image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    win = _gaussian_window()

    def filt(img):
        return signal.convolve(img, win, mode="valid", method="direct")

    c1 = (SSIM_K1 * DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * DYNAMIC_RANGE) ** 2
    mu_a = filt(ya)
    mu_b = filt(yb)
    var_a = filt(ya * ya) - mu_a**2
    var_b = filt(yb * yb) - mu_b**2
    cov = filt(ya * yb) - mu_a * mu_b
    ssim_map = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    )
    return float(ssim_map.mean())


def evaluate(reference, test):
    """PSNR/SSIM report between a reference and a test image."""
    return MetricReport(psnr_db=float(psnr_y(reference, test)),
                        ssim=ssim_y(reference, test))
