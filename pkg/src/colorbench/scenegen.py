"""Deterministic ray-cast renderer for synthetic color scenes.

A ring of colored primitives (spheres, cylinders, cubes) stands on a gray
floor under a black sky. One camera station and one light state per job;
shading is Lambertian diffuse plus ambient with hard shadows. Each render
also emits a pixel-exact label map holding the wheel class of the object
seen through every pixel (255 where floor or sky).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import palette
from .errors import ConfigError, InvalidSweepError
from .imgio import save_label_png, save_rgb_png

EPS = 1e-9
RAY_EPS = 1e-6
SHADOW_BIAS = 1e-5

FLOOR_ALBEDO = np.array([0.5, 0.5, 0.5])

# Object footprints (meters); objects sit on the floor plane z = 0.
SPHERE_RADIUS = 0.35
CYL_RADIUS = 0.30
CYL_HEIGHT = 0.80
CUBE_SIDE = 0.60

SHAPES = ("sphere", "cylinder", "cube")


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CameraConfig:
    height: float = 1.0
    fov_deg: float = 110.0
    width: int = 1280
    height_px: int = 1024
    orbit_radius: float = 3.0
    n_stations: int = 12


@dataclass(frozen=True)
class LightSpec:
    """One swept light source.

    Directional lights sweep their azimuth over `interval` at `step`
    radians with a fixed elevation angle. Point lights sweep an arc
    through the zenith (`arc_interval`/`arc_step`) whose vertical plane is
    itself rotated (`plane_interval`/`plane_step`); `radius` is the
    distance of the light from the scene center.
    """

    kind: str  # "directional" | "point"
    interval: tuple = (0.0, 2.0 * math.pi)
    step: float = math.pi / 6.0
    elevation: float = math.radians(50.0)
    arc_interval: tuple = (-math.pi / 3.0, math.pi / 3.0)
    arc_step: float = math.pi / 6.0
    plane_interval: tuple = (-math.pi / 2.0, math.pi)
    plane_step: float = 3.0 * math.pi / 10.0
    radius: float = 10.0
    intensities: tuple = (1.0,)


@dataclass(frozen=True)
class SceneConfig:
    shape: tuple  # cycled over objects; ("sphere",) etc. or mixed
    ring_radius: float = 2.0
    colors: tuple = tuple(range(palette.N_CLASSES))
    camera: CameraConfig = field(default_factory=CameraConfig)
    lights: tuple = ()
    ambient: float = 0.25
    seed: int = 0
    name: str = "scene"

    @property
    def n_objects(self) -> int:
        return len(self.colors)

    def validate(self) -> None:
        if not 0.0 < self.camera.fov_deg < 180.0:
            raise ConfigError(f"fov {self.camera.fov_deg} outside (0, 180)")
        if self.ring_radius <= 0 or self.camera.orbit_radius <= 0:
            raise ConfigError("radii must be positive")
        for s in self.shape:
            if s not in SHAPES:
                raise ConfigError(f"unknown shape {s!r}")
        for c in self.colors:
            if not 0 <= c < palette.N_CLASSES:
                raise ConfigError(f"color class {c} outside 0..11")


def config_from_dict(d: dict) -> SceneConfig:
    try:
        cam = CameraConfig(**d.get("camera", {}))
        lights = tuple(
            LightSpec(
                **{
                    k: tuple(v) if isinstance(v, list) else v
                    for k, v in spec.items()
                }
            )
            for spec in d.get("lights", ())
        )
        shape = d.get("shape", "sphere")
        cfg = SceneConfig(
            shape=tuple([shape] if isinstance(shape, str) else shape),
            ring_radius=d.get("ring_radius", 2.0),
            colors=tuple(d.get("colors", range(palette.N_CLASSES))),
            camera=cam,
            lights=lights,
            ambient=d.get("ambient", 0.25),
            seed=d.get("seed", 0),
            name=d.get("name", "scene"),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def config_to_dict(cfg: SceneConfig) -> dict:
    return {
        "name": cfg.name,
        "shape": list(cfg.shape),
        "ring_radius": cfg.ring_radius,
        "colors": list(cfg.colors),
        "camera": vars(cfg.camera).copy(),
        "lights": [
            {
                "kind": sp.kind,
                "interval": list(sp.interval),
                "step": sp.step,
                "elevation": sp.elevation,
                "arc_interval": list(sp.arc_interval),
                "arc_step": sp.arc_step,
                "plane_interval": list(sp.plane_interval),
                "plane_step": sp.plane_step,
                "radius": sp.radius,
                "intensities": list(sp.intensities),
            }
            for sp in cfg.lights
        ],
        "ambient": cfg.ambient,
        "seed": cfg.seed,
    }


def desk_preset() -> SceneConfig:
    """36-job reduced sweep at 320x256: 3 stations x (4 dir + 2x4 point).

    Lighting is deliberately harsh (low ambient, intensity past the
    clipping point) so deep shadows and blown highlights stress the
    non-invariant representations the way a real capture would.
    """
    return SceneConfig(
        shape=("sphere", "cylinder", "cube"),
        camera=CameraConfig(width=320, height_px=256, n_stations=3),
        lights=(
            LightSpec("directional", step=math.pi / 2.0, intensities=(1.3,)),
            LightSpec(
                "point",
                arc_step=2.0 * math.pi / 9.0,
                plane_step=3.0 * math.pi / 2.0,
                intensities=(1.3,),
            ),
        ),
        ambient=0.06,
        name="desk",
    )


def paper_preset() -> list[SceneConfig]:
    """Full-magnitude sweep: 3 single-shape scenes, 1008 jobs each."""
    lights = (
        LightSpec("directional", step=math.pi / 6.0, intensities=(0.5, 1.0)),
        LightSpec(
            "point",
            arc_step=math.pi / 6.0,
            plane_step=3.0 * math.pi / 10.0,
            intensities=(0.5, 1.0),
        ),
    )
    return [
        SceneConfig(shape=(s,), camera=CameraConfig(), lights=lights, name=s)
        for s in SHAPES
    ]


# --------------------------------------------------------------------------
# sweep enumeration
# --------------------------------------------------------------------------


def sweep_positions(interval: tuple, step: float) -> list[float]:
    """Angles start, start+step, ... covering the interval inclusively.

    A full 2*pi interval drops the duplicate endpoint. The step must
    divide the interval span exactly (within 1e-9).
    """
    start, end = float(interval[0]), float(interval[1])
    span = end - start
    if step <= 0 or span < 0:
        raise InvalidSweepError(f"bad sweep interval {interval} step {step}")
    n_steps = span / step
    if abs(n_steps - round(n_steps)) > 1e-9:
        raise InvalidSweepError(f"step {step} does not divide span {span}")
    n = int(round(n_steps))
    full_circle = abs(span - 2.0 * math.pi) < 1e-9
    count = n if full_circle else n + 1
    if count < 1:
        count = 1
    return [start + i * step for i in range(count)]


@dataclass(frozen=True)
class LightState:
    kind: str  # "directional" | "point" | "ambient"
    direction: tuple = (0.0, 0.0, -1.0)  # travel direction (directional)
    position: tuple = (0.0, 0.0, 10.0)  # point lights
    intensity: float = 0.0
    meta: dict = field(default_factory=dict)


def _light_states(spec: LightSpec) -> list[LightState]:
    states = []
    if spec.kind == "directional":
        for az in sweep_positions(spec.interval, spec.step):
            ce, se = math.cos(spec.elevation), math.sin(spec.elevation)
            d = (-ce * math.cos(az), -ce * math.sin(az), -se)
            for inten in spec.intensities:
                states.append(
                    LightState(
                        "directional",
                        direction=d,
                        intensity=float(inten),
                        meta={"azimuth": az, "elevation": spec.elevation},
                    )
                )
    elif spec.kind == "point":
        for plane_az in sweep_positions(spec.plane_interval, spec.plane_step):
            for arc in sweep_positions(spec.arc_interval, spec.arc_step):
                pos = (
                    spec.radius * math.sin(arc) * math.cos(plane_az),
                    spec.radius * math.sin(arc) * math.sin(plane_az),
                    spec.radius * math.cos(arc),
                )
                for inten in spec.intensities:
                    states.append(
                        LightState(
                            "point",
                            position=pos,
                            intensity=float(inten),
                            meta={"arc": arc, "plane_azimuth": plane_az},
                        )
                    )
    else:
        raise ConfigError(f"unknown light kind {spec.kind!r}")
    return states


@dataclass(frozen=True)
class RenderJob:
    scene: SceneConfig
    station: int
    camera_pos: tuple
    look_at: tuple
    light: LightState


def _object_center(shape: str, x: float, y: float) -> tuple:
    if shape == "sphere":
        return (x, y, SPHERE_RADIUS)
    if shape == "cylinder":
        return (x, y, CYL_HEIGHT / 2.0)
    return (x, y, CUBE_SIDE / 2.0)


def station_poses(cfg: SceneConfig) -> list[tuple]:
    """(camera position, look-at) per station: aimed at the nearest object."""
    poses = []
    n_obj = cfg.n_objects
    for j in range(cfg.camera.n_stations):
        az = 2.0 * math.pi * j / cfg.camera.n_stations
        pos = (
            cfg.camera.orbit_radius * math.cos(az),
            cfg.camera.orbit_radius * math.sin(az),
            cfg.camera.height,
        )
        i = round(az / (2.0 * math.pi / n_obj)) % n_obj
        shape = cfg.shape[i % len(cfg.shape)]
        obj_az = 2.0 * math.pi * i / n_obj
        look = _object_center(
            shape,
            cfg.ring_radius * math.cos(obj_az),
            cfg.ring_radius * math.sin(obj_az),
        )
        poses.append((pos, look))
    return poses


def enumerate_configs(cfg: SceneConfig) -> list[RenderJob]:
    """Cartesian product of camera stations and light states, in order."""
    cfg.validate()
    states = []
    for spec in cfg.lights:
        states.extend(_light_states(spec))
    if not states:
        states = [LightState("ambient")]
    jobs = []
    for station, (pos, look) in enumerate(station_poses(cfg)):
        for st in states:
            jobs.append(RenderJob(cfg, station, pos, look, st))
    return jobs


# --------------------------------------------------------------------------
# geometry
# --------------------------------------------------------------------------


def _scene_objects(cfg: SceneConfig):
    objs = []
    for i, cls in enumerate(cfg.colors):
        az = 2.0 * math.pi * i / cfg.n_objects
        x = cfg.ring_radius * math.cos(az)
        y = cfg.ring_radius * math.sin(az)
        shape = cfg.shape[i % len(cfg.shape)]
        objs.append((shape, np.array([x, y, 0.0]), int(cls)))
    return objs


def _intersect_sphere(o, d, center, radius):
    oc = o - center
    b = (d * oc).sum(axis=1)
    disc = b * b - ((oc * oc).sum(axis=1) - radius * radius)
    ok = disc > 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    t = -b - sq
    t = np.where(ok & (t > RAY_EPS), t, np.inf)
    return t


def _intersect_cylinder(o, d, base, radius, height):
    rel = o - base
    ox, oy, oz = rel[:, 0], rel[:, 1], rel[:, 2]
    dx, dy, dz = d[:, 0], d[:, 1], d[:, 2]
    a = dx * dx + dy * dy
    b = dx * ox + dy * oy
    c0 = ox * ox + oy * oy - radius * radius
    disc = b * b - a * c0
    ok = (disc > 0) & (a > EPS)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_side = np.where(ok, (-b - sq) / a, np.inf)
    z = oz + t_side * dz
    t_side = np.where((t_side > RAY_EPS) & (z >= 0.0) & (z <= height), t_side, np.inf)

    t = t_side
    for zc, _sign in ((height, 1.0), (0.0, -1.0)):
        with np.errstate(divide="ignore", invalid="ignore"):
            t_cap = (zc - oz) / dz
        px = ox + t_cap * dx
        py = oy + t_cap * dy
        on_disk = px * px + py * py <= radius * radius
        t_cap = np.where((t_cap > RAY_EPS) & on_disk & (np.abs(dz) > EPS), t_cap, np.inf)
        t = np.minimum(t, t_cap)
    return t


def _intersect_box(o, d, lo, hi):
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / d
    t1 = (lo - o) * inv
    t2 = (hi - o) * inv
    tn = np.minimum(t1, t2).max(axis=1)
    tf = np.maximum(t1, t2).min(axis=1)
    hit = (tf >= tn) & (tf > RAY_EPS) & (tn > RAY_EPS)
    return np.where(hit, tn, np.inf)


def _object_params(shape: str, base: np.ndarray):
    if shape == "sphere":
        return {"center": base + [0, 0, SPHERE_RADIUS], "radius": SPHERE_RADIUS}
    if shape == "cylinder":
        return {"base": base, "radius": CYL_RADIUS, "height": CYL_HEIGHT}
    half = CUBE_SIDE / 2.0
    lo = base + [-half, -half, 0.0]
    hi = base + [half, half, CUBE_SIDE]
    return {"lo": lo, "hi": hi}


def _intersect_object(o, d, shape, base):
    o = np.broadcast_to(np.atleast_2d(o), d.shape)
    p = _object_params(shape, base)
    if shape == "sphere":
        return _intersect_sphere(o, d, p["center"], p["radius"])
    if shape == "cylinder":
        return _intersect_cylinder(o, d, p["base"], p["radius"], p["height"])
    return _intersect_box(o, d, p["lo"], p["hi"])


def _object_normal(points, shape, base):
    p = _object_params(shape, base)
    if shape == "sphere":
        n = points - p["center"]
        return n / np.linalg.norm(n, axis=1, keepdims=True)
    if shape == "cylinder":
        n = np.zeros_like(points)
        z = points[:, 2] - base[2]
        top = z >= p["height"] - 1e-6
        bottom = z <= 1e-6
        side = ~(top | bottom)
        n[top] = (0.0, 0.0, 1.0)
        n[bottom] = (0.0, 0.0, -1.0)
        radial = points[side] - base
        radial[:, 2] = 0.0
        n[side] = radial / np.linalg.norm(radial, axis=1, keepdims=True)
        return n
    lo, hi = p["lo"], p["hi"]
    n = np.zeros_like(points)
    dist = np.stack(
        [
            np.abs(points[:, 0] - lo[0]),
            np.abs(points[:, 0] - hi[0]),
            np.abs(points[:, 1] - lo[1]),
            np.abs(points[:, 1] - hi[1]),
            np.abs(points[:, 2] - lo[2]),
            np.abs(points[:, 2] - hi[2]),
        ],
        axis=1,
    )
    face = dist.argmin(axis=1)
    normals = np.array(
        [
            [-1, 0, 0],
            [1, 0, 0],
            [0, -1, 0],
            [0, 1, 0],
            [0, 0, -1],
            [0, 0, 1],
        ],
        dtype=np.float64,
    )
    return normals[face]


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------


def _camera_rays(pos, look, fov_deg, width, height):
    fwd = np.asarray(look, dtype=np.float64) - pos
    fwd /= np.linalg.norm(fwd)
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(fwd, up)
    right /= np.linalg.norm(right)
    upv = np.cross(right, fwd)
    half_w = math.tan(math.radians(fov_deg) / 2.0)
    half_h = half_w * height / width
    xs = (2.0 * (np.arange(width) + 0.5) / width - 1.0) * half_w
    ys = (1.0 - 2.0 * (np.arange(height) + 0.5) / height) * half_h
    dirs = (
        fwd[None, None]
        + xs[None, :, None] * right[None, None]
        + ys[:, None, None] * upv[None, None]
    )
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    return dirs.reshape(-1, 3)


def render(job: RenderJob) -> tuple[np.ndarray, np.ndarray]:
    """Render one job to an (H, W, 3) uint8 image and (H, W) uint8 labels."""
    cfg = job.scene
    w, h = cfg.camera.width, cfg.camera.height_px
    origin = np.asarray(job.camera_pos, dtype=np.float64)
    dirs = _camera_rays(origin, job.look_at, cfg.camera.fov_deg, w, h)
    n_px = len(dirs)
    objs = _scene_objects(cfg)

    best_t = np.full(n_px, np.inf)
    hit_obj = np.full(n_px, -1, dtype=np.int32)  # -2 floor, -1 sky, >=0 object
    for i, (shape, base, _cls) in enumerate(objs):
        t = _intersect_object(origin, dirs, shape, base)
        closer = t < best_t
        best_t = np.where(closer, t, best_t)
        hit_obj = np.where(closer, i, hit_obj)
    dz = dirs[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_floor = np.where(dz < -EPS, -origin[2] / dz, np.inf)
    t_floor = np.where(t_floor > RAY_EPS, t_floor, np.inf)
    closer = t_floor < best_t
    best_t = np.where(closer, t_floor, best_t)
    hit_obj = np.where(closer, -2, hit_obj)

    labels = np.full(n_px, palette.BACKGROUND, dtype=np.uint8)
    albedo = np.zeros((n_px, 3))
    normals = np.zeros((n_px, 3))
    anything = hit_obj != -1
    points = origin + np.where(anything, best_t, 0.0)[:, None] * dirs
    floor_mask = hit_obj == -2
    albedo[floor_mask] = FLOOR_ALBEDO
    normals[floor_mask] = (0.0, 0.0, 1.0)
    for i, (shape, base, cls) in enumerate(objs):
        m = hit_obj == i
        if not m.any():
            continue
        labels[m] = cls
        albedo[m] = palette.RGB[cls] / 255.0
        normals[m] = _object_normal(points[m], shape, base)

    shade = np.full(n_px, cfg.ambient)
    light = job.light
    if light.kind != "ambient" and light.intensity > 0:
        if light.kind == "directional":
            lvec = -np.asarray(light.direction, dtype=np.float64)
            lvec /= np.linalg.norm(lvec)
            ldirs = np.broadcast_to(lvec, (n_px, 3))
            ldist = np.full(n_px, np.inf)
        else:
            to_light = np.asarray(light.position, dtype=np.float64) - points
            ldist = np.linalg.norm(to_light, axis=1)
            ldirs = to_light / np.maximum(ldist[:, None], EPS)
        lambert = np.maximum(0.0, (normals * ldirs).sum(axis=1))
        lit = anything & (lambert > 0)
        if lit.any():
            shadow = np.zeros(lit.sum(), dtype=bool)
            so = points[lit] + normals[lit] * SHADOW_BIAS
            sd = ldirs[lit]
            for shape, base, _cls in objs:
                t = _intersect_object(so, sd, shape, base)
                shadow |= t < ldist[lit] - SHADOW_BIAS
            contrib = light.intensity * lambert[lit]
            contrib[shadow] = 0.0
            shade[lit] = shade[lit] + contrib

    rgb = albedo * shade[:, None]
    rgb[~anything] = 0.0  # black sky
    img = np.rint(np.clip(rgb, 0.0, 1.0) * 255.0).astype(np.uint8)
    return img.reshape(h, w, 3), labels.reshape(h, w)


# --------------------------------------------------------------------------
# dataset generation
# --------------------------------------------------------------------------


def generate_dataset(configs, out_dir) -> dict:
    """Render every job of every config; write PNG pairs plus manifest.json.

    Returns the manifest dict. Reruns with the same configs produce
    byte-identical files.
    """
    if isinstance(configs, SceneConfig):
        configs = [configs]
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output dir {out}: {exc}") from None

    files = []
    index = 0
    for cfg in configs:
        for job in enumerate_configs(cfg):
            img, labels = render(job)
            img_name = f"{index:04d}_img.png"
            lbl_name = f"{index:04d}_label.png"
            save_rgb_png(out / img_name, img)
            save_label_png(out / lbl_name, labels)
            files.append(
                {
                    "index": index,
                    "img": img_name,
                    "label": lbl_name,
                    "scene": cfg.name,
                    "station": job.station,
                    "camera_pos": list(job.camera_pos),
                    "light": {
                        "kind": job.light.kind,
                        "intensity": job.light.intensity,
                        **job.light.meta,
                    },
                }
            )
            index += 1
    manifest = {
        "schema_version": 1,
        "configs": [config_to_dict(c) for c in configs],
        "files": files,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
