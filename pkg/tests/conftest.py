import math

import pytest

from colorbench import scenegen
from colorbench.harness import discover_corpus


@pytest.fixture(scope="session")
def desk_corpus(tmp_path_factory):
    """The 36-image desk preset rendered once per session."""
    out = tmp_path_factory.mktemp("desk_corpus")
    scenegen.generate_dataset(scenegen.desk_preset(), out)
    return out


@pytest.fixture(scope="session")
def mini_corpus(tmp_path_factory):
    """A 4-image corpus small enough for harness/CLI round trips."""
    out = tmp_path_factory.mktemp("mini_corpus")
    cfg = scenegen.SceneConfig(
        shape=("sphere",),
        camera=scenegen.CameraConfig(width=160, height_px=128, n_stations=2),
        lights=(
            scenegen.LightSpec(
                "directional", step=math.pi, intensities=(1.0,)
            ),
        ),
        ambient=0.2,
        name="mini",
    )
    scenegen.generate_dataset(cfg, out)
    assert len(discover_corpus(out)) == 4
    return out
