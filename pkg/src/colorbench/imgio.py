"""File formats: 8-bit PNG rasters/labels and the planar float format.

Planar float files carry a converted image as raw little-endian float32
planes behind a 16-byte header: 4-byte magic ``CBPF``, then width, height
and channel count as little-endian uint32.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .colorspace import PlaneImage, to_unit_planes

PLANE_MAGIC = b"CBPF"
_HEADER = struct.Struct("<4sIII")


def load_rgb_png(path) -> np.ndarray:
    """Read an image file as an (H, W, 3) uint8 raster."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def save_rgb_png(path, raster: np.ndarray) -> None:
    arr = np.asarray(raster)
    if arr.dtype != np.uint8:
        arr = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(arr, mode="RGB").save(path, format="PNG")


def load_label_png(path) -> np.ndarray:
    """Read a label map as an (H, W) uint8 array (class index or 255)."""
    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def save_label_png(path, labels: np.ndarray) -> None:
    Image.fromarray(np.asarray(labels, dtype=np.uint8), mode="L").save(
        path, format="PNG"
    )


def save_gray_png(path, values: np.ndarray) -> None:
    """Write a [0, 1] float map (or bool mask) as 8-bit grayscale."""
    arr = np.asarray(values)
    if arr.dtype == bool:
        out = np.where(arr, 255, 0).astype(np.uint8)
    else:
        out = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(out, mode="L").save(path, format="PNG")


def save_planes(path, plane: PlaneImage) -> None:
    """Write PlaneImage channels as planar float32, little endian."""
    h, w, c = plane.data.shape
    data = np.ascontiguousarray(
        plane.data.transpose(2, 0, 1).astype("<f4", copy=False)
    )
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(PLANE_MAGIC, w, h, c))
        fh.write(data.tobytes())


def load_planes(path) -> np.ndarray:
    """Read a planar float file back as an (H, W, C) float32 array."""
    raw = Path(path).read_bytes()
    magic, w, h, c = _HEADER.unpack_from(raw)
    if magic != PLANE_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    if data.size != w * h * c:
        raise ValueError(f"{path}: truncated plane data")
    return data.reshape(c, h, w).transpose(1, 2, 0)


def save_plane_visual(path, plane: PlaneImage) -> None:
    """PNG visualization: channels range-mapped to [0, 1] and stacked as RGB."""
    save_rgb_png(path, to_unit_planes(plane))
