"""
A tour of the color space catalog
=================================

Convert one synthetic scene into every cataloged color space, check the
declared channel ranges, and save a few converted images both as planar
float files and as range-mapped PNG visualizations.
"""

from pathlib import Path

import numpy as np

from colorbench import scenegen
from colorbench.colorspace import (
    INVARIANT_SPACES,
    SPACE_NAMES,
    channel_range,
    convert,
    normalize_pixelwise,
)
from colorbench.imgio import save_plane_visual, save_planes, save_rgb_png

out = Path(__file__).parent / "output" / "01_color_space_tour"
out.mkdir(parents=True, exist_ok=True)

###############################################################################
# Render a single frame of the desk scene to use as the working image.

cfg = scenegen.desk_preset()
job = scenegen.enumerate_configs(cfg)[0]
img, labels = scenegen.render(job)
save_rgb_png(out / "scene.png", img)
print(f"rendered {img.shape[1]}x{img.shape[0]} scene, "
      f"{np.count_nonzero(labels != 255)} object pixels")

###############################################################################
# Every conversion respects its declared per-channel bounds. The invariant
# spaces (C1C2C3, NOPP, rg) do not move when the illumination is scaled.

half = (img.astype(np.float64) / 255.0) * 0.5
for name in SPACE_NAMES:
    plane = convert(img, name)
    bounds = channel_range(name)
    assert (plane.data >= bounds[:, 0]).all() and (plane.data <= bounds[:, 1]).all()
    drift = np.abs(convert(half, name).data - plane.data).max()
    tag = "invariant" if name in INVARIANT_SPACES else f"drift {drift:.3f}"
    print(f"  {name:8s} ranges {np.round(bounds.ravel(), 2).tolist()}  [{tag}]")

###############################################################################
# Save a handful of spaces to disk: raw planar float32 plus a PNG preview.

for name in ("C1C2C3", "Lab", "HSV", "rg"):
    plane = convert(img, name)
    save_planes(out / f"{name}.cbpf", plane)
    save_plane_visual(out / f"{name}.png", plane)

###############################################################################
# The primed variants run on the pixel-wise normalized image, which removes
# the shading and leaves per-class chromaticity.

normed = normalize_pixelwise(img)
save_rgb_png(out / "scene_normalized.png", normed)
plane = convert(normed, "HSI", normalized_input=True)
save_plane_visual(out / "HSI_primed.png", plane)
print(f"wrote planar files and previews to {out}")
