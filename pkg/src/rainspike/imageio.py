"""Image loading/saving (PNG and binary PPM) via Pillow."""

import numpy as np
from PIL import Image

from .validation import check_image_u8


def load_image(path):
    """Load an image as (h, w, 3) uint8 RGB."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def save_image(image, path):
    img = check_image_u8(image, "image")
    Image.fromarray(img).save(path)
