"""Bayer-CFA color spike camera simulation.

Each pixel integrates its (optionally noisy) normalized intensity; when the
accumulator crosses the firing threshold the pixel emits a 1-bit spike and
resets. A Bayer color filter array turns an RGB video into a mosaic intensity
sequence so the same integrate-and-fire core produces color spike streams.
"""

from dataclasses import dataclass

import numpy as np

from .streamio import CameraConfig, ResetMode, SpikeStream
from .validation import check_dims, check_image_u8

BAYER_TILES = {
    "RGGB": np.array([["R", "G"], ["G", "B"]]),
    "BGGR": np.array([["B", "G"], ["G", "R"]]),
    "GRBG": np.array([["G", "R"], ["B", "G"]]),
    "GBRG": np.array([["G", "B"], ["R", "G"]]),
}


@dataclass(frozen=True)
class BayerMask:
    """Per-channel binary masks partitioning the sensor grid."""

    pattern: str
    m_r: np.ndarray
    m_g: np.ndarray
    m_b: np.ndarray

    @property
    def dims(self):
        return self.m_r.shape

    def channel_index(self):
        """(h, w) int map: 0 where red, 1 where green, 2 where blue."""
        return (
            0 * self.m_r + 1 * self.m_g + 2 * self.m_b
        ).astype(np.int64)


def make_bayer_mask(dims, pattern):
    """Standard 2x2 Bayer tiling over an (h, w) grid."""
    h, w = check_dims(dims)
    pattern = pattern.upper()
    if pattern not in BAYER_TILES:
        raise ValueError(f"unknown Bayer pattern: {pattern}")
    tile = BAYER_TILES[pattern]
    ys, xs = np.mgrid[0:h, 0:w]
    letters = tile[ys % 2, xs % 2]
    return BayerMask(
        pattern=pattern,
        m_r=(letters == "R").astype(np.uint8),
        m_g=(letters == "G").astype(np.uint8),
        m_b=(letters == "B").astype(np.uint8),
    )


@dataclass(frozen=True)
class ColorSpikeStream:
    """A spike stream whose pixels carry the colors of a Bayer mask."""

    stream: SpikeStream
    mask: BayerMask


def _noise_std(intensity, config):
    return np.sqrt(config.sigma_g**2 + config.sigma_p**2 * intensity)


def integrate_and_fire(frames, config):
    """Run the per-pixel integrate-and-fire loop over a frame sequence.

    Each input frame is held for `upsample_factor` substeps of length
    dt = 1/upsample_factor. Per substep the accumulator gains
    max(I + eta, 0) * dt with eta ~ N(0, sigma_g^2 + sigma_p^2 * I); crossing
    the threshold emits a spike and resets per config.reset_mode.
    Deterministic given config.seed (counter-based Philox RNG, independent of
    evaluation order).
    """
    if len(frames) == 0:
        raise ValueError("empty frame list")
    frames = [np.asarray(f, dtype=np.float64) for f in frames]
    shape = frames[0].shape
    for f in frames:
        if f.shape != shape:
            raise ValueError("dims mismatch between frames")
        if f.ndim != 2:
            raise ValueError(f"expected (h, w) intensity frames, got {f.shape}")
    h, w = shape
    u = config.upsample_factor
    dt = 1.0 / u
    noisy = config.sigma_g > 0 or config.sigma_p > 0
    rng = np.random.Generator(np.random.Philox(key=np.uint64(config.seed)))

    acc = np.zeros((h, w), dtype=np.float64)
    spikes = np.empty((len(frames) * u, h, w), dtype=bool)
    t = 0
    for frame in frames:
        std = _noise_std(frame, config) if noisy else None
        for _ in range(u):
            drive = frame
            if noisy:
                drive = np.maximum(frame + rng.normal(0.0, 1.0, size=shape) * std, 0.0)
            acc = acc + drive * dt
            fired = acc >= config.threshold
            spikes[t] = fired
            if config.reset_mode is ResetMode.SUBTRACT_THRESHOLD:
                acc = np.where(fired, acc - config.threshold, acc)
            else:
                acc = np.where(fired, 0.0, acc)
            t += 1
    return SpikeStream.from_dense(spikes, config=config)


def mosaic_intensity(rgb_frame, mask):
    """Scalar intensity per pixel: the masked channel's value / 255."""
    img = check_image_u8(rgb_frame, "frame")
    if img.shape[:2] != mask.dims:
        raise ValueError(
            f"dims mismatch: frame {img.shape[:2]} vs mask {mask.dims}"
        )
    idx = mask.channel_index()
    ys, xs = np.mgrid[0 : img.shape[0], 0 : img.shape[1]]
    return img[ys, xs, idx].astype(np.float64) / 255.0


def simulate_color_spikes(rgb_frames, mask, config):
    """Simulate a Bayer color spike camera over an RGB frame sequence."""
    if len(rgb_frames) == 0:
        raise ValueError("empty frame list")
    mono = [mosaic_intensity(f, mask) for f in rgb_frames]
    stream = integrate_and_fire(mono, config)
    stream = SpikeStream(
        height=stream.height,
        width=stream.width,
        timesteps=stream.timesteps,
        payload=stream.payload,
        config=config,
        pattern=mask.pattern,
    )
    return ColorSpikeStream(stream=stream, mask=mask)
