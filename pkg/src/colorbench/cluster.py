"""Pixel clustering and silhouette scoring of color discriminability.

Clustering is hard-EM k-means (Lloyd iterations) with k-means++ seeding,
run as the best of several restarts by within-cluster sum of squares.
Silhouette per sample: s = (b - a) / max(a, b), with a the mean distance
to the sample's own cluster and b the smallest mean distance to another
cluster; singletons and degenerate (a = b = 0) samples score 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import palette
from .colorspace import PlaneImage, to_unit_planes
from .errors import TooFewPixelsError

DEFAULT_SAMPLE = 2000
N_RESTARTS = 10
MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class ClusterResult:
    k: int
    assignments: np.ndarray  # (N,) int
    centers: np.ndarray  # (k, 3)
    sampled_indices: np.ndarray  # (N,) flat pixel positions
    wcss: float
    wcss_history: tuple = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class SilhouetteReport:
    per_pixel: np.ndarray  # (N,) values in [-1, 1]
    mean: float
    per_cluster_mean: np.ndarray  # (k,)
    k: int
    n_samples: int
    seed: int | None = None
    flagged_single_cluster: bool = False

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "mean": self.mean,
            "per_cluster_mean": [float(v) for v in self.per_cluster_mean],
            "sample_size": self.n_samples,
            "seed": self.seed,
            "flagged_single_cluster": self.flagged_single_cluster,
        }


def unit_pixels(plane: PlaneImage) -> np.ndarray:
    """(H*W, 3) matrix of range-normalized channel vectors."""
    return to_unit_planes(plane).reshape(-1, 3)


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j:] = points[rng.integers(n, size=k - j)]
            break
        centers[j] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    return centers


def _lloyd(points, k, rng, max_iter):
    centers = _kmeanspp(points, k, rng)
    assign = np.full(len(points), -1)
    history = []
    for _ in range(max_iter):
        d2 = cdist(points, centers, metric="sqeuclidean")
        new_assign = d2.argmin(axis=1)
        history.append(float(d2[np.arange(len(points)), new_assign].sum()))
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = points[assign == j]
            if len(members):
                centers[j] = members.mean(axis=0)
            else:
                # revive an empty cluster at the point farthest from its center
                far = d2[np.arange(len(points)), assign].argmax()
                centers[j] = points[far]
    return assign, centers, history[-1], tuple(history)


def cluster_pixels(
    img: PlaneImage,
    k: int,
    seed: int,
    *,
    sample_size: int = DEFAULT_SAMPLE,
    mask: np.ndarray | None = None,
    n_restarts: int = N_RESTARTS,
    max_iter: int = MAX_ITER,
) -> ClusterResult:
    """Cluster a (bounded, seeded) sample of the image's pixel vectors.

    `mask` limits sampling, e.g. to non-background pixels. Channels are
    scaled into [0, 1] by the space's declared ranges before clustering.
    Deterministic for a fixed seed; restarts keep the best WCSS.
    """
    vectors = unit_pixels(img)
    pool = np.arange(len(vectors))
    if mask is not None:
        pool = pool[np.asarray(mask, dtype=bool).reshape(-1)]
    if len(pool) < k:
        raise TooFewPixelsError(f"{len(pool)} candidate pixels for k={k}")
    rng = np.random.default_rng(seed)
    if len(pool) > sample_size:
        idx = np.sort(rng.choice(pool, size=sample_size, replace=False))
    else:
        idx = pool
    points = vectors[idx]

    best = None
    for _ in range(max(1, n_restarts)):
        sub = np.random.default_rng(rng.integers(2**63))
        assign, centers, wcss, hist = _lloyd(points, k, sub, max_iter)
        if best is None or wcss < best[2] - 1e-15:
            best = (assign, centers, wcss, hist)
    assign, centers, wcss, hist = best
    return ClusterResult(k, assign, centers, idx, wcss, hist)


def silhouette(
    result: ClusterResult,
    points: np.ndarray,
    *,
    seed: int | None = None,
    denominator: str = "max",
) -> SilhouetteReport:
    """Silhouette values for clustered sample points.

    `denominator="max"` is the standard max(a, b) form. The alternative
    `"difference"` evaluates the literal (a - b) denominator for
    diagnostic comparison only; it does not respect the [-1, 1] bound.
    """
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(result.assignments)
    n = len(points)
    k = result.k
    if k < 2:
        return SilhouetteReport(
            np.zeros(n), 0.0, np.zeros(max(k, 1)), k, n, seed, True
        )

    onehot = np.zeros((n, k))
    onehot[np.arange(n), labels] = 1.0
    sizes = onehot.sum(axis=0)
    dist = cdist(points, points)
    cluster_sums = dist @ onehot  # (n, k) summed distance into each cluster

    own = cluster_sums[np.arange(n), labels]
    own_size = sizes[labels]
    a = np.divide(own, own_size - 1.0, out=np.zeros(n), where=own_size > 1)

    mean_to = np.divide(
        cluster_sums, sizes, out=np.full_like(cluster_sums, np.inf), where=sizes > 0
    )
    mean_to[np.arange(n), labels] = np.inf
    b = mean_to.min(axis=1)

    if denominator == "max":
        denom = np.maximum(a, b)
    elif denominator == "difference":
        denom = a - b
    else:
        raise ValueError(f"unknown denominator form {denominator!r}")
    s = np.divide(b - a, denom, out=np.zeros(n), where=denom != 0)
    s = np.where(own_size > 1, s, 0.0)  # singleton convention

    per_cluster = np.array(
        [s[labels == j].mean() if sizes[j] > 0 else 0.0 for j in range(k)]
    )
    return SilhouetteReport(s, float(s.mean()), per_cluster, k, n, seed, False)


def discriminability(
    img: PlaneImage,
    truth: np.ndarray,
    seed: int,
    *,
    sample_size: int = DEFAULT_SAMPLE,
) -> SilhouetteReport:
    """Cluster non-background pixels with k = number of classes present.

    Single-class images come back flagged with a zero mean instead of a
    silhouette, since separation is undefined there.
    """
    truth = np.asarray(truth)
    fg = truth != palette.BACKGROUND
    classes = np.unique(truth[fg])
    k = len(classes)
    if k < 2:
        n = int(fg.sum())
        return SilhouetteReport(np.zeros(0), 0.0, np.zeros(max(k, 1)), k, n, seed, True)
    result = cluster_pixels(img, k, seed, sample_size=sample_size, mask=fg)
    points = unit_pixels(img)[result.sampled_indices]
    return silhouette(result, points, seed=seed)
