"""Classical spike-to-intensity reconstruction: spike counting over a window
(TFP), inter-spike intervals (TFI), and CFA-aware color reconstruction with
bilinear demosaicing."""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage


class ReconMethod(Enum):
    TFP = "tfp"
    TFI = "tfi"


@dataclass(frozen=True)
class ReconConfig:
    method: ReconMethod = ReconMethod.TFP
    window: int = 39
    demosaic: str = "bilinear"  # "none" or "bilinear"

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")


def tfp(stream, center_t, window):
    """Intensity from spike counts: theta * count / effective window length.

    The window [center_t - window//2, center_t - window//2 + window) is
    clipped to the stream; the clipped length is the denominator.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    theta = stream.config.threshold
    lo = center_t - window // 2
    hi = lo + window
    lo = max(lo, 0)
    hi = min(hi, stream.timesteps)
    if hi <= lo:
        raise ValueError("window does not intersect the stream")
    dense = stream.to_dense()
    counts = dense[lo:hi].sum(axis=0).astype(np.float64)
    return np.clip(theta * counts / (hi - lo), 0.0, 1.0)


def tfi(stream, t):
    """Intensity from inter-spike intervals at query time t.

    Per pixel: locate the nearest spike at or before t and the next spike
    strictly after it; intensity = theta / interval. Pixels without such a
    bracketing pair (or with fewer than two spikes) get 0.
    """
    if not 0 <= t < stream.timesteps:
        raise ValueError(f"t out of [0, {stream.timesteps})")
    theta = stream.config.threshold
    dense = stream.to_dense()
    T, h, w = dense.shape
    out = np.zeros((h, w), dtype=np.float64)

    # index of the last spike at or before t, per pixel (-1 if none)
    times = np.arange(T)[:, None, None]
    before = np.where(dense & (times <= t), times, -1).max(axis=0)
    # index of the first spike strictly after `before`, per pixel
    after = np.where(dense & (times > before[None]), times, T).min(axis=0)
    valid = (before >= 0) & (after < T)
    interval = (after - before).astype(np.float64)
    out[valid] = theta / interval[valid]
    return np.clip(out, 0.0, 1.0)


def _demosaic_channel(values, mask_c):
    """Fill a sparsely sampled channel by normalized bilinear convolution.

    Exact on constant fields everywhere, including borders.
    """
    kernel = np.array(
        [[0.25, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 0.25]], dtype=np.float64
    )
    m = mask_c.astype(np.float64)
    num = ndimage.convolve(values * m, kernel, mode="constant")
    den = ndimage.convolve(m, kernel, mode="constant")
    filled = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    # keep the measured samples untouched
    return np.where(mask_c > 0, values, filled)


def cfa_reconstruct(cstream, config, center_t):
    """Reconstruct an (h, w, 3) u8 image from a color spike stream.

    Per channel, intensity is reconstructed at that channel's mask pixels via
    the configured method, then missing pixels are filled by bilinear
    interpolation over the channel's sample grid.
    """
    stream = cstream.stream
    if stream.pattern is None:
        raise ValueError("not a color stream")
    mask = cstream.mask
    if config.method is ReconMethod.TFP:
        mono = tfp(stream, center_t, config.window)
    else:
        mono = tfi(stream, center_t)

    channels = []
    for mask_c in (mask.m_r, mask.m_g, mask.m_b):
        if config.demosaic == "none":
            channels.append(mono * mask_c)
        else:
            channels.append(_demosaic_channel(mono, mask_c))
    out = np.stack(channels, axis=-1) * 255.0
    return np.rint(np.clip(out, 0.0, 255.0)).astype(np.uint8)
