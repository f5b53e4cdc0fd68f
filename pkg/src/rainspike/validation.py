"""Shared input-validation helpers used across the toolkit."""

import numpy as np


def check_image_u8(img, name="image"):
    """Validate an (h, w, 3) uint8 color image and return it as ndarray."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name}: expected (h, w, 3) array, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name}: empty image")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"{name}: expected uint8 values in [0, 255]")
    return arr


def check_dims(dims, name="dims"):
    h, w = int(dims[0]), int(dims[1])
    if h <= 0 or w <= 0:
        raise ValueError(f"{name}: empty image")
    return h, w


def check_same_shape(a, b, name_a="a", name_b="b"):
    if np.shape(a)[:2] != np.shape(b)[:2]:
        raise ValueError(
            f"shape mismatch: {name_a} {np.shape(a)} vs {name_b} {np.shape(b)}"
        )


def check_range(value, lo, hi, name):
    if not (lo <= value <= hi):
        raise ValueError(f"{name} out of [{lo}, {hi}]: {value}")
    return value
