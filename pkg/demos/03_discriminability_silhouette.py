"""
Color discriminability via silhouette analysis
==============================================

Cluster the object pixels of a scene with k set to the number of colors
present, then score how well separated the color groups are in a few
different spaces, on both the original and the normalized image.
"""

import json
from pathlib import Path

from colorbench import scenegen
from colorbench.cluster import discriminability
from colorbench.colorspace import convert, normalize_pixelwise

out = Path(__file__).parent / "output" / "03_discriminability"
out.mkdir(parents=True, exist_ok=True)

###############################################################################
# Render one shaded frame. The label map tells the evaluator how many
# distinct wheel colors are visible, which fixes the cluster count k.

cfg = scenegen.desk_preset()
img, labels = scenegen.render(scenegen.enumerate_configs(cfg)[0])

###############################################################################
# Silhouette per space: higher means the color groups form tighter, more
# separated clusters. Normalization helps the non-invariant spaces by
# removing the shading spread inside each group.

reports = {}
for space in ("C1C2C3", "rg", "RGB", "Lab", "YIQ"):
    plain = discriminability(convert(img, space), labels, seed=0, sample_size=1500)
    normed = discriminability(
        convert(normalize_pixelwise(img), space, normalized_input=True),
        labels,
        seed=0,
        sample_size=1500,
    )
    reports[space] = plain
    reports[space + "'"] = normed
    print(
        f"{space:6s} k={plain.k}  silhouette {plain.mean:.4f}   "
        f"normalized {normed.mean:.4f}"
    )

###############################################################################
# Reports serialize to JSON with the cluster count, the mean, per-cluster
# means, the sample size and the sampling seed.

with open(out / "silhouette_reports.json", "w") as fh:
    json.dump(
        {label: rep.as_dict() for label, rep in reports.items()},
        fh,
        indent=2,
        sort_keys=True,
    )
print(f"wrote {out / 'silhouette_reports.json'}")
