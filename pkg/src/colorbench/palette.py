"""The 12-class traditional color wheel palette.

Class indices follow wheel order starting at red. RGB values place the
primary/secondary names on exact 30-degree HSV hue steps at full
saturation and value; the tertiary names or/yo/vb sit on the canonical
intermediate hue steps of the traditional wheel (which is non-uniform in
HSV hue between green and blue).
"""

from __future__ import annotations

import numpy as np

# (name, (R, G, B)) in wheel order; index in this tuple == class index.
WHEEL = (
    ("r", (255, 0, 0)),
    ("or", (255, 64, 0)),
    ("o", (255, 128, 0)),
    ("yo", (255, 191, 0)),
    ("y", (255, 255, 0)),
    ("gy", (128, 255, 0)),
    ("g", (0, 255, 0)),
    ("bg", (0, 255, 128)),
    ("b", (0, 0, 255)),
    ("vb", (64, 0, 255)),
    ("v", (128, 0, 255)),
    ("rv", (255, 0, 128)),
)

NAMES = tuple(name for name, _ in WHEEL)
N_CLASSES = len(WHEEL)

# Per-pixel label value for anything that is not a wheel-colored object.
BACKGROUND = 255

# (12, 3) uint8 lookup table, row index == class index.
RGB = np.array([rgb for _, rgb in WHEEL], dtype=np.uint8)


def class_index(name: str) -> int:
    """Class index for a wheel color abbreviation."""
    try:
        return NAMES.index(name)
    except ValueError:
        raise KeyError(f"unknown wheel color {name!r}") from None


def class_color(index: int) -> tuple[int, int, int]:
    """RGB triple of a wheel class."""
    return tuple(int(v) for v in RGB[index])
