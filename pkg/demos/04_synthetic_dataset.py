"""
Generating a synthetic corpus
=============================

Enumerate the render jobs of a scene sweep and write the image / label /
manifest triple that the evaluation harness consumes. The desk preset is
the 36-image reduced sweep; the paper-scale preset enumerates thousands
of jobs (listed here, not rendered).
"""

import json
from pathlib import Path

import numpy as np

from colorbench import scenegen
from colorbench.imgio import load_label_png

out = Path(__file__).parent / "output" / "04_dataset"

###############################################################################
# The sweep is the Cartesian product of camera stations and light states.

desk = scenegen.desk_preset()
jobs = scenegen.enumerate_configs(desk)
kinds = {}
for j in jobs:
    kinds[j.light.kind] = kinds.get(j.light.kind, 0) + 1
print(f"desk preset: {len(jobs)} jobs ({kinds})")

paper_jobs = sum(len(scenegen.enumerate_configs(c)) for c in scenegen.paper_preset())
print(f"paper-scale preset: {paper_jobs} jobs at 1280x1024 (not rendered here)")

###############################################################################
# Rendering writes NNNN_img.png / NNNN_label.png pairs plus manifest.json.
# Labels are independent of lighting, so every station shares one label map.

manifest = scenegen.generate_dataset(desk, out)
print(f"wrote {len(manifest['files'])} pairs to {out}")

by_station = {}
for entry in manifest["files"]:
    by_station.setdefault(entry["station"], []).append(entry["label"])
for station, names in sorted(by_station.items()):
    ref = load_label_png(out / names[0])
    same = all(np.array_equal(ref, load_label_png(out / n)) for n in names[1:])
    classes = sorted(int(c) for c in np.unique(ref[ref != 255]))
    print(f"  station {station}: {len(names)} renders, labels identical={same}, "
          f"classes in view {classes}")

###############################################################################
# The manifest echoes the scene configuration, so a rerun recreates the
# corpus byte for byte.

with open(out / "manifest.json") as fh:
    echo = json.load(fh)["configs"][0]
print(f"ambient {echo['ambient']}, lights "
      f"{[spec['kind'] for spec in echo['lights']]}, seed {echo['seed']}")
