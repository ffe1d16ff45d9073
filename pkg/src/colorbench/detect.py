"""Histogram backprojection and detection scoring.

A 3-D color histogram is built from a single-class template; backprojecting
replaces every image pixel with the ratio value (bin count over max count)
of the bin that pixel falls in, giving a [0, 1] likelihood map for the
template's color. Maps are thresholded and scored against ground-truth
label maps with recall / precision / F-measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import palette
from .colorspace import PlaneImage, channel_range, convert
from .errors import (
    DimensionMismatchError,
    EmptyTemplateError,
    InvalidBinsError,
    SpaceMismatchError,
)

BIN_SIZES = (16, 32, 64, 128)


@dataclass(frozen=True, eq=False)
class Template:
    """Patch of pixels that all belong to one wheel color class."""

    pixels: np.ndarray  # (h, w, 3), uint8 or [0, 1] float
    color_class: int


def checker_template(color_class: int, size: int = 32) -> Template:
    """Solid color-checker patch of one wheel class."""
    rgb = palette.RGB[color_class]
    return Template(np.tile(rgb, (size, size, 1)).astype(np.uint8), color_class)


def checker_templates(size: int = 32) -> list[Template]:
    """The built-in 12-patch color checker, one template per class."""
    return [checker_template(c, size) for c in range(palette.N_CLASSES)]


@dataclass(frozen=True, eq=False)
class Histogram3D:
    """B^3 bin counts over the three range-normalized channels of a space."""

    bins_per_channel: int
    counts: np.ndarray  # (B, B, B) uint32
    space: str
    normalized_input: bool = False
    _ratio_cache: list = field(default_factory=list, repr=False, compare=False)

    @property
    def max_count(self) -> int:
        return int(self.counts.max())

    @property
    def ratio(self) -> np.ndarray:
        """Counts divided by the max count; all zeros for an empty histogram."""
        if not self._ratio_cache:
            m = self.max_count
            r = self.counts.astype(np.float64)
            if m > 0:
                r /= m
            self._ratio_cache.append(r)
        return self._ratio_cache[0]

    def lookup(self, flat_bins: np.ndarray) -> np.ndarray:
        """Ratio values for flattened bin indices (backprojection gather)."""
        m = self.max_count
        if m == 0:
            return np.zeros(flat_bins.shape, dtype=np.float64)
        return self.counts.reshape(-1)[flat_bins].astype(np.float64) / m


def quantize(plane: PlaneImage, bins: int) -> np.ndarray:
    """Flattened (H, W) bin index of every pixel under a B^3 grid.

    Channels are mapped affinely into [0, 1] by the space's declared
    ranges, then floored to bin floor(v * B), with v = 1 clamped into the
    last bin.
    """
    if bins not in BIN_SIZES:
        raise InvalidBinsError(f"bins must be one of {BIN_SIZES}, got {bins}")
    rng = channel_range(plane.space)
    u = (plane.data - rng[:, 0]) / (rng[:, 1] - rng[:, 0])
    q = np.clip((u * bins).astype(np.int64), 0, bins - 1)
    return (q[..., 0] * bins + q[..., 1]) * bins + q[..., 2]


def build_histogram(
    template: Template,
    space: str,
    bins: int,
    *,
    normalized_input: bool = False,
) -> Histogram3D:
    """Quantize the template's pixels in `space` and count bin hits."""
    px = np.asarray(template.pixels)
    if px.size == 0:
        raise EmptyTemplateError("template has no pixels")
    plane = convert(px, space, normalized_input=normalized_input)
    flat = quantize(plane, bins)
    counts = np.zeros(bins**3, dtype=np.uint32)
    np.add.at(counts, flat.reshape(-1), 1)
    return Histogram3D(bins, counts.reshape(bins, bins, bins), space, normalized_input)


def backproject(img: PlaneImage, hist: Histogram3D) -> np.ndarray:
    """Eq.-style ratio lookup: map each pixel to its bin's ratio value."""
    if img.space != hist.space:
        raise SpaceMismatchError(
            f"image is {img.space}, histogram is {hist.space}"
        )
    return hist.lookup(quantize(img, hist.bins_per_channel))


def binarize(bp_map: np.ndarray, tau: float) -> np.ndarray:
    """Boolean mask of map values >= tau."""
    return np.asarray(bp_map) >= tau


@dataclass(frozen=True)
class DetectionScore:
    recall: float
    precision: float
    fmeasure: float
    true_pos: float
    false_pos: float
    false_neg: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "DetectionScore":
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        f = 2.0 * r * p / (r + p) if r + p > 0 else 0.0
        return cls(r, p, f, tp, fp, fn)


def score(mask: np.ndarray, truth: np.ndarray, color_class: int) -> DetectionScore:
    """Confusion counts of a detection mask against one label class.

    Pixels of every other class and the background count as negatives.
    """
    mask = np.asarray(mask, dtype=bool)
    truth = np.asarray(truth)
    if mask.shape != truth.shape:
        raise DimensionMismatchError(
            f"mask {mask.shape} vs truth {truth.shape}"
        )
    positive = truth == color_class
    tp = int(np.count_nonzero(mask & positive))
    fp = int(np.count_nonzero(mask & ~positive))
    fn = int(np.count_nonzero(~mask & positive))
    return DetectionScore.from_counts(tp, fp, fn)


def mean_score(scores: list[DetectionScore]) -> DetectionScore:
    """Arithmetic mean of R, P and F (and of the raw counts) over scores."""
    n = len(scores)
    return DetectionScore(
        sum(s.recall for s in scores) / n,
        sum(s.precision for s in scores) / n,
        sum(s.fmeasure for s in scores) / n,
        sum(s.true_pos for s in scores) / n,
        sum(s.false_pos for s in scores) / n,
        sum(s.false_neg for s in scores) / n,
    )


def score_averaged(
    img: np.ndarray,
    truth: np.ndarray,
    template: Template,
    space: str,
    tau: float,
    *,
    bins_list=BIN_SIZES,
    normalized_input: bool = False,
) -> DetectionScore:
    """Backprojection score averaged over the standard bin sizes."""
    plane = convert(img, space, normalized_input=normalized_input)
    per_bin = []
    for bins in bins_list:
        hist = build_histogram(
            template, space, bins, normalized_input=normalized_input
        )
        mask = binarize(backproject(plane, hist), tau)
        per_bin.append(score(mask, truth, template.color_class))
    return mean_score(per_bin)
