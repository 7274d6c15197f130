"""Image tensor conventions and PNG import/export.

Images travel through the pipeline as float32 arrays/tensors shaped (3, H, W)
with values in [-1, 1]. PNG export quantizes with (v + 1) * 127.5.
"""

import numpy as np
from PIL import Image

__all__ = ["to_uint8", "from_uint8", "save_png", "load_png"]


def to_uint8(img):
    """(3, H, W) float in [-1, 1] -> (H, W, 3) uint8."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[0] != 3:
        raise ValueError(f"expected (3, H, W) image, got shape {arr.shape}")
    quant = np.clip((arr + 1.0) * 127.5, 0.0, 255.0)
    return np.round(quant).astype(np.uint8).transpose(1, 2, 0)


def from_uint8(arr):
    """(H, W, 3) uint8 -> (3, H, W) float32 in [-1, 1]."""
    arr = np.asarray(arr)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) array, got shape {arr.shape}")
    return (arr.astype(np.float32) / 127.5 - 1.0).transpose(2, 0, 1)


def save_png(img, path):
    Image.fromarray(to_uint8(img)).save(path, format="PNG")


def load_png(path):
    with Image.open(path) as im:
        return from_uint8(np.asarray(im.convert("RGB")))
