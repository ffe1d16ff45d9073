"""colorbench: detectability and discriminability of colored objects
across 20 color spaces, with a synthetic scene generator and a color-
guided visual search simulation."""

from .colorspace import (
    INVARIANT_SPACES,
    INVERTIBLE_SPACES,
    SPACE_NAMES,
    PlaneImage,
    channel_range,
    convert,
    convert_inverse,
    normalize_pixelwise,
    to_unit_planes,
)
from .cluster import (
    ClusterResult,
    SilhouetteReport,
    cluster_pixels,
    discriminability,
    silhouette,
)
from .detect import (
    BIN_SIZES,
    DetectionScore,
    Histogram3D,
    Template,
    backproject,
    binarize,
    build_histogram,
    checker_templates,
    score,
    score_averaged,
)
from .scenegen import (
    CameraConfig,
    LightSpec,
    SceneConfig,
    desk_preset,
    enumerate_configs,
    generate_dataset,
    paper_preset,
    render,
)
from .searchsim import (
    AgentState,
    SearchParams,
    SearchResult,
    World,
    benchmark_world,
    observe,
    plan_next,
    run_search,
)

__version__ = "0.1.0"
