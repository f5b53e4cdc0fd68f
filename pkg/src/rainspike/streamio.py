"""Bit-packed spike stream container, file format, and stream statistics.

File layout (little-endian):
  magic "SPKS" | version u16 | height u32 | width u32 | T u32 |
  pattern u8 (0=none, 1=RGGB, 2=BGGR, 3=GRBG, 4=GBRG) | reset_mode u8 |
  threshold f32 | sigma_g f32 | sigma_p f32
followed by the payload: bits in (t, y, x) lexicographic order, MSB-first
within each byte, zero-padded to a byte boundary.
"""

import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

MAGIC = b"SPKS"
VERSION = 1
_HEADER = struct.Struct("<4sHIIIBBfff")

PATTERN_CODES = {None: 0, "RGGB": 1, "BGGR": 2, "GRBG": 3, "GBRG": 4}
PATTERN_NAMES = {v: k for k, v in PATTERN_CODES.items()}


class ResetMode(Enum):
    RESET_TO_ZERO = 0
    SUBTRACT_THRESHOLD = 1


@dataclass(frozen=True)
class CameraConfig:
    """Spike camera parameters: firing threshold, Poisson-Gaussian noise
    levels, temporal upsampling, reset semantics, RNG seed."""

    threshold: float = 1.0
    sigma_g: float = 0.0
    sigma_p: float = 0.0
    upsample_factor: int = 1
    reset_mode: ResetMode = ResetMode.SUBTRACT_THRESHOLD
    seed: int = 0

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.sigma_g < 0 or self.sigma_p < 0:
            raise ValueError("noise sigmas must be >= 0")
        if self.upsample_factor < 1:
            raise ValueError("upsample_factor must be >= 1")


def pack_bits(dense):
    """Pack a binary (T, H, W) tensor into bytes, (t, y, x) order, MSB-first."""
    dense = np.asarray(dense)
    return np.packbits(dense.astype(bool).ravel()).tobytes()


def unpack_bits(payload, shape):
    """Inverse of pack_bits for the given (T, H, W) shape."""
    t, h, w = shape
    n = t * h * w
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), count=n)
    return bits.reshape(t, h, w).astype(bool)


@dataclass(frozen=True)
class SpikeStream:
    """Immutable H x W x T binary spike tensor with camera metadata."""

    height: int
    width: int
    timesteps: int
    payload: bytes
    config: CameraConfig = field(default_factory=CameraConfig)
    pattern: str = None  # Bayer pattern name, or None for mono streams

    def __post_init__(self):
        expected = (self.timesteps * self.height * self.width + 7) // 8
        if len(self.payload) != expected:
            raise ValueError(
                f"payload size {len(self.payload)} != expected {expected} bytes"
            )
        if self.pattern not in PATTERN_CODES:
            raise ValueError(f"unknown Bayer pattern: {self.pattern}")

    @classmethod
    def from_dense(cls, dense, config=None, pattern=None):
        dense = np.asarray(dense)
        if dense.ndim != 3:
            raise ValueError(f"expected (T, H, W) tensor, got shape {dense.shape}")
        t, h, w = dense.shape
        return cls(
            height=h,
            width=w,
            timesteps=t,
            payload=pack_bits(dense),
            config=config or CameraConfig(),
            pattern=pattern,
        )

    def to_dense(self):
        """Unpacked (T, H, W) boolean spike tensor."""
        return unpack_bits(self.payload, (self.timesteps, self.height, self.width))


def write_stream(stream, path):
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        stream.height,
        stream.width,
        stream.timesteps,
        PATTERN_CODES[stream.pattern],
        stream.config.reset_mode.value,
        stream.config.threshold,
        stream.config.sigma_g,
        stream.config.sigma_p,
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(stream.payload)


def read_stream(path):
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise ValueError("truncated spike stream file")
    magic, version, h, w, t, pat, reset, thr, sg, sp = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"bad magic: {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported version: {version}")
    if pat not in PATTERN_NAMES:
        raise ValueError(f"unknown pattern code: {pat}")
    config = CameraConfig(
        threshold=thr,
        sigma_g=sg,
        sigma_p=sp,
        reset_mode=ResetMode(reset),
    )
    payload = raw[_HEADER.size:]
    expected = (t * h * w + 7) // 8
    if len(payload) != expected:
        raise ValueError(f"payload size {len(payload)} != expected {expected}")
    return SpikeStream(
        height=h,
        width=w,
        timesteps=t,
        payload=payload,
        config=config,
        pattern=PATTERN_NAMES[pat],
    )


def stream_stats(stream):
    """Per-pixel spike counts, global firing rate, and sparsity.

    Counts come from popcount over the packed payload; sparsity is total
    spikes over H*W*T (this is the `s` fed to the energy model).
    """
    dense = stream.to_dense()
    counts = dense.sum(axis=0).astype(np.int64)
    total = int(counts.sum())
    n_bits = stream.height * stream.width * stream.timesteps
    rate = total / n_bits
    return {
        "per_pixel_counts": counts,
        "total_spikes": total,
        "firing_rate": rate,
        "sparsity": rate,
    }
