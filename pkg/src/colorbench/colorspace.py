"""Color space catalog: RGB rasters to 20 evaluated spaces plus RGB itself.

Conventions
-----------
* Input rasters are (H, W, 3) arrays. ``uint8`` data is scaled by 1/255;
  floating-point data is taken as already being on the [0, 1] scale
  (e.g. the output of :func:`normalize_pixelwise`).
* Every conversion is a pure per-pixel function; identical inputs give
  bit-identical outputs.
* Two-channel spaces (rg, COPP, NOPP, xyz) keep a third all-zero plane so
  every PlaneImage has exactly three channels.
* The CIE family (XYZ, xyz, xyY, Lab, Luv, UVW) decodes the sRGB transfer
  curve before applying the D65 primaries matrix. Video/opponent/hue
  spaces operate on the stored (gamma-encoded) values directly, matching
  their usual definitions.
* Hue channels are angles in radians on [0, 2*pi).

The full constants table is published in docs/colorspace_catalog.md.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownSpaceError

# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------

TWO_PI = 2.0 * np.pi
HALF_PI = 0.5 * np.pi

# sRGB -> XYZ (linear RGB, D65 white), IEC 61966-2-1 primaries.
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3576691, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
XYZ_TO_SRGB = np.linalg.inv(SRGB_TO_XYZ)

# White point as the image of (1, 1, 1): keeps Lab/Luv/UVW of white exact.
D65_WHITE = SRGB_TO_XYZ.sum(axis=1)

# NTSC luma + chroma (FCC YIQ).
YIQ_M = np.array(
    [
        [0.299, 0.587, 0.114],
        [0.595716, -0.274453, -0.321263],
        [0.211456, -0.522591, 0.311135],
    ]
)

# BT.470 YUV derived from luma differences.
_Y_ROW = np.array([0.299, 0.587, 0.114])
YUV_M = np.vstack(
    [
        _Y_ROW,
        0.492111 * (np.array([0.0, 0.0, 1.0]) - _Y_ROW),
        0.877283 * (np.array([1.0, 0.0, 0.0]) - _Y_ROW),
    ]
)

# Full-range YCrCb (JPEG), chroma offset +0.5.
YCRCB_M = np.vstack(
    [
        _Y_ROW,
        0.713 * (np.array([1.0, 0.0, 0.0]) - _Y_ROW),
        0.564 * (np.array([0.0, 0.0, 1.0]) - _Y_ROW),
    ]
)
YCRCB_OFFSET = np.array([0.0, 0.5, 0.5])

# Xerox YES.
YES_M = np.array(
    [
        [0.253, 0.684, 0.063],
        [0.5, -0.5, 0.0],
        [0.25, 0.25, -0.5],
    ]
)

# Ohta features.
I1I2I3_M = np.array(
    [
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [0.5, 0.0, -0.5],
        [-0.25, 0.5, -0.25],
    ]
)

# Orthonormal opponent axes.
OPP_M = np.array(
    [
        [1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0), 0.0],
        [1.0 / np.sqrt(6.0), 1.0 / np.sqrt(6.0), -2.0 / np.sqrt(6.0)],
        [1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0)],
    ]
)

# CMY as an affine map so it shares the matrix-space plumbing.
CMY_M = -np.eye(3)
CMY_OFFSET = np.array([1.0, 1.0, 1.0])

_LAB_DELTA = 6.0 / 29.0

# Channel bounds of the nonlinear CIE spaces over the full 8-bit sRGB cube,
# found by dense numeric scan and padded; the range-soundness fuzz test
# guards them.
LAB_RANGES = ((0.0, 100.0), (-87.0, 99.1), (-108.9, 95.4))
LUV_RANGES = ((0.0, 100.0), (-84.0, 176.0), (-135.0, 108.0))
UVW_RANGES = ((-85.0, 176.0), (-90.0, 73.0), (-17.0, 99.05))

_U8 = 1.0 / 255.0


# --------------------------------------------------------------------------
# plane image container
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PlaneImage:
    """Converted image: (H, W, 3) float64 channels in a named space."""

    data: np.ndarray
    space: str
    normalized_input: bool = False

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


# --------------------------------------------------------------------------
# input handling
# --------------------------------------------------------------------------


def _to_unit(img: np.ndarray) -> np.ndarray:
    """Raster to float64 on the [0, 1] scale (uint8 divided by 255)."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) raster, got shape {arr.shape}")
    if arr.dtype == np.uint8:
        return arr.astype(np.float64) * _U8
    return arr.astype(np.float64)


def normalize_pixelwise(img: np.ndarray) -> np.ndarray:
    """Divide each channel by the per-pixel channel sum.

    Black pixels (zero sum) map to (1/3, 1/3, 1/3). Output channels lie in
    [0, 1] and sum to one per pixel; the operation is idempotent and
    invariant to a positive per-pixel scale.
    """
    arr = _to_unit(img)
    s = arr.sum(axis=2, keepdims=True)
    out = np.divide(arr, s, out=np.full_like(arr, 1.0 / 3.0), where=s > 0)
    return out


# --------------------------------------------------------------------------
# transfer curve + shared pieces
# --------------------------------------------------------------------------


def _srgb_decode(v: np.ndarray) -> np.ndarray:
    v = np.maximum(v, 0.0)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def _srgb_encode(v: np.ndarray) -> np.ndarray:
    v = np.maximum(v, 0.0)
    return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1.0 / 2.4) - 0.055)


def _apply_matrix(arr: np.ndarray, m: np.ndarray, offset=None) -> np.ndarray:
    out = arr @ m.T
    if offset is not None:
        out = out + offset
    return out


def _to_xyz(arr: np.ndarray) -> np.ndarray:
    return _apply_matrix(_srgb_decode(arr), SRGB_TO_XYZ)


def _lab_f(t: np.ndarray) -> np.ndarray:
    d3 = _LAB_DELTA**3
    return np.where(t > d3, np.cbrt(t), t / (3.0 * _LAB_DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(t: np.ndarray) -> np.ndarray:
    return np.where(t > _LAB_DELTA, t**3, 3.0 * _LAB_DELTA**2 * (t - 4.0 / 29.0))


def _hue_rad(r, g, b, cmax, delta):
    """Hexcone hue in radians, 0 where the pixel is achromatic."""
    h = np.zeros_like(r)
    safe = np.where(delta > 0, delta, 1.0)
    h = np.where((delta > 0) & (cmax == r), ((g - b) / safe) % 6.0, h)
    h = np.where((delta > 0) & (cmax == g) & (cmax != r), (b - r) / safe + 2.0, h)
    h = np.where(
        (delta > 0) & (cmax == b) & (cmax != r) & (cmax != g), (r - g) / safe + 4.0, h
    )
    return h * (np.pi / 3.0)


# --------------------------------------------------------------------------
# forward transforms (all take/return (H, W, 3) float64 on [0, 1] input)
# --------------------------------------------------------------------------


def _fwd_rgb(arr):
    return arr.copy()


def _fwd_xyz_tristimulus(arr):
    return _to_xyz(arr)


def _chromaticity(xyz):
    s = xyz.sum(axis=2, keepdims=True)
    return np.divide(xyz, s, out=np.full_like(xyz, 1.0 / 3.0), where=s > 0)


def _fwd_xyz_chroma(arr):
    c = _chromaticity(_to_xyz(arr))
    out = np.zeros_like(c)
    out[..., 0] = c[..., 0]
    out[..., 1] = c[..., 1]
    return out


def _fwd_xyy(arr):
    xyz = _to_xyz(arr)
    c = _chromaticity(xyz)
    out = np.empty_like(xyz)
    out[..., 0] = c[..., 0]
    out[..., 1] = c[..., 1]
    out[..., 2] = xyz[..., 1] / D65_WHITE[1]
    return out


def _fwd_lab(arr):
    xyz = _to_xyz(arr)
    f = _lab_f(xyz / D65_WHITE)
    out = np.empty_like(xyz)
    out[..., 0] = 116.0 * f[..., 1] - 16.0
    out[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    out[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return out


def _uv_prime(xyz):
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    d = x + 15.0 * y + 3.0 * z
    safe = np.where(d > 0, d, 1.0)
    u = np.where(d > 0, 4.0 * x / safe, _UN_PRIME)
    v = np.where(d > 0, 9.0 * y / safe, _VN_PRIME)
    return u, v


_D65_DENOM = D65_WHITE[0] + 15.0 * D65_WHITE[1] + 3.0 * D65_WHITE[2]
_UN_PRIME = 4.0 * D65_WHITE[0] / _D65_DENOM
_VN_PRIME = 9.0 * D65_WHITE[1] / _D65_DENOM
_UN_1960 = _UN_PRIME
_VN_1960 = 6.0 * D65_WHITE[1] / _D65_DENOM


def _fwd_luv(arr):
    xyz = _to_xyz(arr)
    yr = xyz[..., 1] / D65_WHITE[1]
    el = 116.0 * _lab_f(yr) - 16.0
    u, v = _uv_prime(xyz)
    out = np.empty_like(xyz)
    out[..., 0] = el
    out[..., 1] = 13.0 * el * (u - _UN_PRIME)
    out[..., 2] = 13.0 * el * (v - _VN_PRIME)
    return out


def _fwd_uvw(arr):
    # CIE 1964 U*V*W* with CIE 1960 (u, v) chromaticities.
    xyz = _to_xyz(arr)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    d = x + 15.0 * y + 3.0 * z
    safe = np.where(d > 0, d, 1.0)
    u = np.where(d > 0, 4.0 * x / safe, _UN_1960)
    v = np.where(d > 0, 6.0 * y / safe, _VN_1960)
    w = 25.0 * np.cbrt(100.0 * y / D65_WHITE[1]) - 17.0
    out = np.empty_like(xyz)
    out[..., 0] = 13.0 * w * (u - _UN_1960)
    out[..., 1] = 13.0 * w * (v - _VN_1960)
    out[..., 2] = w
    return out


def _fwd_hsv(arr):
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    cmax = arr.max(axis=2)
    cmin = arr.min(axis=2)
    delta = cmax - cmin
    s = np.divide(delta, cmax, out=np.zeros_like(cmax), where=cmax > 0)
    return np.stack([_hue_rad(r, g, b, cmax, delta), s, cmax], axis=-1)


def _fwd_hsl(arr):
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    cmax = arr.max(axis=2)
    cmin = arr.min(axis=2)
    delta = cmax - cmin
    light = 0.5 * (cmax + cmin)
    denom = 1.0 - np.abs(2.0 * light - 1.0)
    s = np.divide(delta, denom, out=np.zeros_like(delta), where=denom > 0)
    return np.stack([_hue_rad(r, g, b, cmax, delta), s, light], axis=-1)


def _fwd_hsi(arr):
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    total = r + g + b
    i = total / 3.0
    cmin = arr.min(axis=2)
    s = 1.0 - np.divide(3.0 * cmin, total, out=np.ones_like(total), where=total > 0)
    s = np.where(total > 0, s, 0.0)
    num = 0.5 * ((r - g) + (r - b))
    den = np.sqrt((r - g) ** 2 + (r - b) * (g - b))
    cosang = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    theta = np.arccos(np.clip(cosang, -1.0, 1.0))
    h = np.where(b > g, TWO_PI - theta, theta)
    h = np.where(den > 0, h, 0.0)
    return np.stack([h, s, i], axis=-1)


def _fwd_c1c2c3(arr):
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    return np.stack(
        [
            np.arctan2(r, np.maximum(g, b)),
            np.arctan2(g, np.maximum(r, b)),
            np.arctan2(b, np.maximum(r, g)),
        ],
        axis=-1,
    )


def _fwd_rg(arr):
    s = arr.sum(axis=2, keepdims=True)
    c = np.divide(arr, s, out=np.full_like(arr, 1.0 / 3.0), where=s > 0)
    out = np.zeros_like(arr)
    out[..., 0] = c[..., 0]
    out[..., 1] = c[..., 1]
    return out


def _fwd_nopp(arr):
    opp = _apply_matrix(arr, OPP_M)
    inten = opp[..., 2:3]
    chroma = np.divide(
        opp[..., :2], inten, out=np.zeros_like(opp[..., :2]), where=inten > 0
    )
    out = np.zeros_like(arr)
    out[..., :2] = chroma
    return out


def _fwd_copp(arr):
    opp = _apply_matrix(arr, OPP_M)
    out = np.zeros_like(arr)
    out[..., :2] = opp[..., :2]
    return out


# --------------------------------------------------------------------------
# inverse transforms (only for the invertible subset)
# --------------------------------------------------------------------------


def _inv_xyz(data):
    return _srgb_encode(_apply_matrix(data, XYZ_TO_SRGB))


def _matrix_inverse(m: np.ndarray, offset=None):
    minv = np.linalg.inv(m)

    def _inv(data):
        x = data - offset if offset is not None else data
        return _apply_matrix(x, minv)

    return _inv


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------


def _matrix_ranges(m: np.ndarray, offset=None):
    lo = np.minimum(m, 0.0).sum(axis=1)
    hi = np.maximum(m, 0.0).sum(axis=1)
    if offset is not None:
        lo = lo + offset
        hi = hi + offset
    return tuple((float(a), float(b)) for a, b in zip(lo, hi))


def _matrix_forward(m: np.ndarray, offset=None):
    def _fwd(arr):
        return _apply_matrix(arr, m, offset)

    return _fwd


@dataclass(frozen=True)
class SpaceDef:
    name: str
    forward: callable
    ranges: tuple
    inverse: callable = None
    zeroed_channel: int = -1  # index of the all-zero redundant plane, or -1


_SQ32 = float(np.sqrt(1.5))
_SQ2 = float(np.sqrt(2.0))

_DEFS = [
    SpaceDef("RGB", _fwd_rgb, ((0, 1), (0, 1), (0, 1)), _fwd_rgb),
    SpaceDef("XYZ", _fwd_xyz_tristimulus, _matrix_ranges(SRGB_TO_XYZ), _inv_xyz),
    SpaceDef("xyz", _fwd_xyz_chroma, ((0, 1), (0, 1), (0, 1)), zeroed_channel=2),
    SpaceDef("xyY", _fwd_xyy, ((0, 1), (0, 1), (0, 1))),
    SpaceDef("Lab", _fwd_lab, LAB_RANGES),
    SpaceDef("Luv", _fwd_luv, LUV_RANGES),
    SpaceDef("UVW", _fwd_uvw, UVW_RANGES),
    SpaceDef(
        "YIQ", _matrix_forward(YIQ_M), _matrix_ranges(YIQ_M), _matrix_inverse(YIQ_M)
    ),
    SpaceDef(
        "YUV", _matrix_forward(YUV_M), _matrix_ranges(YUV_M), _matrix_inverse(YUV_M)
    ),
    SpaceDef(
        "YCrCb",
        _matrix_forward(YCRCB_M, YCRCB_OFFSET),
        _matrix_ranges(YCRCB_M, YCRCB_OFFSET),
        _matrix_inverse(YCRCB_M, YCRCB_OFFSET),
    ),
    SpaceDef(
        "YES", _matrix_forward(YES_M), _matrix_ranges(YES_M), _matrix_inverse(YES_M)
    ),
    SpaceDef(
        "CMY",
        _matrix_forward(CMY_M, CMY_OFFSET),
        ((0, 1), (0, 1), (0, 1)),
        _matrix_inverse(CMY_M, CMY_OFFSET),
    ),
    SpaceDef("HSI", _fwd_hsi, ((0.0, TWO_PI), (0, 1), (0, 1))),
    SpaceDef("HSV", _fwd_hsv, ((0.0, TWO_PI), (0, 1), (0, 1))),
    SpaceDef("HSL", _fwd_hsl, ((0.0, TWO_PI), (0, 1), (0, 1))),
    SpaceDef(
        "I1I2I3",
        _matrix_forward(I1I2I3_M),
        _matrix_ranges(I1I2I3_M),
        _matrix_inverse(I1I2I3_M),
    ),
    SpaceDef(
        "OPP", _matrix_forward(OPP_M), _matrix_ranges(OPP_M), _matrix_inverse(OPP_M)
    ),
    SpaceDef(
        "NOPP",
        _fwd_nopp,
        ((-_SQ32, _SQ32), (-_SQ2, 1.0 / _SQ2), (0, 1)),
        zeroed_channel=2,
    ),
    SpaceDef(
        "COPP",
        _fwd_copp,
        (_matrix_ranges(OPP_M)[0], _matrix_ranges(OPP_M)[1], (0.0, 1.0)),
        zeroed_channel=2,
    ),
    SpaceDef("rg", _fwd_rg, ((0, 1), (0, 1), (0, 1)), zeroed_channel=2),
    SpaceDef("C1C2C3", _fwd_c1c2c3, ((0.0, HALF_PI),) * 3),
]

REGISTRY = {d.name: d for d in _DEFS}

SPACE_NAMES = tuple(d.name for d in _DEFS)

# Representations unchanged by a uniform scaling of the input.
INVARIANT_SPACES = ("C1C2C3", "NOPP", "rg")

# Spaces with an exact inverse back to RGB.
INVERTIBLE_SPACES = tuple(d.name for d in _DEFS if d.inverse is not None)


def _lookup(space: str) -> SpaceDef:
    try:
        return REGISTRY[space]
    except KeyError:
        raise UnknownSpaceError(f"unknown color space {space!r}") from None


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------


def channel_range(space: str) -> np.ndarray:
    """Theoretical (min, max) per channel, as a (3, 2) float array."""
    return np.array(_lookup(space).ranges, dtype=np.float64)


def convert(img: np.ndarray, space: str, *, normalized_input: bool = False) -> PlaneImage:
    """Convert an RGB raster to `space`, clamping into its channel ranges.

    For a primed evaluation the caller runs :func:`normalize_pixelwise`
    first and passes ``normalized_input=True`` so the provenance is kept
    on the result.
    """
    d = _lookup(space)
    out = d.forward(_to_unit(img))
    rng = channel_range(space)
    np.clip(out, rng[:, 0], rng[:, 1], out=out)
    return PlaneImage(out, space, normalized_input)


def convert_inverse(plane: PlaneImage) -> np.ndarray:
    """Map an invertible-space PlaneImage back to a [0, 1] RGB raster."""
    d = _lookup(plane.space)
    if d.inverse is None:
        raise ValueError(f"{plane.space} has no exact inverse")
    return d.inverse(plane.data)


def to_unit_planes(plane: PlaneImage) -> np.ndarray:
    """Affinely map each channel into [0, 1] using its declared range."""
    rng = channel_range(plane.space)
    span = rng[:, 1] - rng[:, 0]
    u = (plane.data - rng[:, 0]) / span
    return np.clip(u, 0.0, 1.0)
