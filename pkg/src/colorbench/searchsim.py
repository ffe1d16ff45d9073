"""Grid-world active visual search guided by color backprojection.

An agent on a 2-D occupancy grid looks for a uniquely colored target among
colored distractor objects. Each step it observes the cells in view,
scores object cells by backprojecting their (illumination-noised) color
against the target's histogram, and greedily moves to the candidate pose
with the best mix of remembered color similarity and unexplored area.
Steps walked stand in for search time.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import palette
from .colorspace import convert, normalize_pixelwise
from .detect import Histogram3D, Template, build_histogram, quantize
from .errors import ConfigError, NoCandidatesError

FREE = -1
OBSTACLE = -2

# 4-connected moves in deterministic order: up, right, down, left.
MOVES = ((-1, 0), (0, 1), (1, 0), (0, -1))


@dataclass(frozen=True, eq=False)
class World:
    """Occupancy grid: FREE, OBSTACLE, or a wheel class index per cell."""

    grid: np.ndarray  # (H, W) int16
    target_mask: np.ndarray  # (H, W) bool, cells of the sought object
    starts: tuple  # candidate start cells ((r, c), ...)
    seed: int = 0
    _vis_cache: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self) -> tuple:
        return self.grid.shape

    @property
    def target_class(self) -> int:
        return int(self.grid[self.target_mask][0])

    def validate(self) -> None:
        if not self.target_mask.any():
            raise ConfigError("world has no target cells")
        classes = np.unique(self.grid[self.target_mask])
        if len(classes) != 1 or classes[0] < 0:
            raise ConfigError("target cells must share one object class")
        for r, c in self.starts:
            if self.grid[r, c] != FREE:
                raise ConfigError(f"start {(r, c)} is not a free cell")

    def visibility(self, view_range: int) -> np.ndarray:
        """(N, N) boolean line-of-sight matrix over flattened cells.

        vis[a, b]: a free cell `a` sees cell `b` within `view_range` when
        every strictly intermediate cell on the Bresenham line is free.
        Cached per range; the grid is immutable.
        """
        if view_range not in self._vis_cache:
            self._vis_cache[view_range] = _visibility_matrix(self.grid, view_range)
        return self._vis_cache[view_range]


def _bresenham(r0, c0, r1, c1):
    """Cells strictly between two endpoints on the raster line."""
    cells = []
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r1 > r0 else -1
    sc = 1 if c1 > c0 else -1
    err = dr - dc
    r, c = r0, c0
    while True:
        if (r, c) != (r0, c0) and (r, c) != (r1, c1):
            cells.append((r, c))
        if (r, c) == (r1, c1):
            break
        e2 = 2 * err
        if e2 > -dc:
            err -= dc
            r += sr
        if e2 < dr:
            err += dr
            c += sc
    return cells


def _visibility_matrix(grid: np.ndarray, view_range: int) -> np.ndarray:
    h, w = grid.shape
    n = h * w
    transparent = grid == FREE
    vis = np.zeros((n, n), dtype=bool)
    rr = view_range * view_range
    for r0 in range(h):
        for c0 in range(w):
            if grid[r0, c0] != FREE:
                continue
            a = r0 * w + c0
            for r1 in range(max(0, r0 - view_range), min(h, r0 + view_range + 1)):
                for c1 in range(max(0, c0 - view_range), min(w, c0 + view_range + 1)):
                    if (r1 - r0) ** 2 + (c1 - c0) ** 2 > rr:
                        continue
                    if all(
                        transparent[r, c] for r, c in _bresenham(r0, c0, r1, c1)
                    ):
                        vis[a, r1 * w + c1] = True
    return vis


# --------------------------------------------------------------------------
# world construction
# --------------------------------------------------------------------------


def world_from_dict(d: dict) -> World:
    """World from row strings plus a char legend.

    Legend values: "free", "obstacle", or {"class": idx, "target": bool}.
    """
    rows = d["rows"]
    legend = d["legend"]
    h = len(rows)
    w = len(rows[0])
    if any(len(r) != w for r in rows):
        raise ConfigError("world rows differ in length")
    grid = np.full((h, w), FREE, dtype=np.int16)
    target = np.zeros((h, w), dtype=bool)
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            try:
                spec = legend[ch]
            except KeyError:
                raise ConfigError(f"char {ch!r} missing from legend") from None
            if spec == "free":
                continue
            if spec == "obstacle":
                grid[r, c] = OBSTACLE
            else:
                grid[r, c] = int(spec["class"])
                if spec.get("target", False):
                    target[r, c] = True
    starts = tuple(tuple(s) for s in d.get("starts", ()))
    world = World(grid, target, starts, d.get("seed", 0))
    world.validate()
    return world


def load_world(path) -> World:
    with open(path) as fh:
        return world_from_dict(json.load(fh))


def benchmark_world() -> World:
    """Fixed 20x20 benchmark: walls split the map, blue 3x3 target in the
    far room, three distractor objects elsewhere, four corner starts."""
    rows = [
        "####################",
        "#........#.........#",
        "#.rrr....#.....ggg.#",
        "#.rrr....#.....ggg.#",
        "#.rrr....#.....ggg.#",
        "#........#.........#",
        "#........#.........#",
        "######.########.####",
        "#..................#",
        "#..................#",
        "#####.########.#####",
        "#........#.........#",
        "#........#....bbb..#",
        "#.yyy....#....bbb..#",
        "#.yyy....#....bbb..#",
        "#.yyy....#.........#",
        "#........#.........#",
        "#........#.........#",
        "#........#.........#",
        "####################",
    ]
    legend = {
        ".": "free",
        "#": "obstacle",
        "r": {"class": palette.class_index("r")},
        "g": {"class": palette.class_index("g")},
        "y": {"class": palette.class_index("y")},
        "b": {"class": palette.class_index("b"), "target": True},
    }
    return world_from_dict(
        {
            "rows": rows,
            "legend": legend,
            "starts": [(1, 1), (1, 18), (18, 1), (18, 18)],
            "seed": 0,
        }
    )


# --------------------------------------------------------------------------
# search state
# --------------------------------------------------------------------------


@dataclass
class SearchParams:
    alpha: float = 1.0  # weight of remembered similarity mass
    beta: float = 0.1  # weight of unexplored cells in view
    view_range: int = 5
    detect_range: int = 2
    fov: float = 2.0 * math.pi
    bins: int = 32
    brightness_noise: tuple = (0.5, 1.5)  # per-cell illumination factor
    primed: bool = False


@dataclass
class AgentState:
    position: tuple
    heading: float = 0.0
    fov: float = 2.0 * math.pi
    view_range: int = 5
    visited: np.ndarray = None  # seen cells
    step_count: int = 0


@dataclass(frozen=True, eq=False)
class SearchResult:
    found: bool
    steps: int
    space: str
    trajectory: tuple

    @property
    def primed(self):
        return None  # provenance carried by the harness rows


def _fov_filter(vis_row, agent, shape):
    if agent.fov >= 2.0 * math.pi - 1e-9:
        return vis_row
    h, w = shape
    r0, c0 = agent.position
    idx = np.flatnonzero(vis_row)
    keep = vis_row.copy()
    for i in idx:
        r, c = divmod(i, w)
        if (r, c) == (r0, c0):
            continue
        ang = math.atan2(-(r - r0), c - c0)
        d = (ang - agent.heading + math.pi) % (2.0 * math.pi) - math.pi
        if abs(d) > agent.fov / 2.0:
            keep[i] = False
    return keep


def object_similarities(
    world: World,
    space: str,
    target_hist: Histogram3D,
    cell_colors: np.ndarray,
) -> np.ndarray:
    """Backprojection ratio per cell given each object cell's RGB color.

    `cell_colors` is (N, 3) float on the [0, 1] scale (noise may push
    values past 1; the conversion clamps per its channel ranges). Non-
    object cells score 0.
    """
    flat = world.grid.reshape(-1)
    sims = np.zeros(flat.shape, dtype=np.float64)
    obj = np.flatnonzero(flat >= 0)
    if len(obj) == 0:
        return sims
    colors = cell_colors[obj].reshape(-1, 1, 3)
    if target_hist.normalized_input:
        colors = normalize_pixelwise(colors)
    plane = convert(colors, space, normalized_input=target_hist.normalized_input)
    sims[obj] = target_hist.lookup(quantize(plane, target_hist.bins_per_channel))[:, 0]
    return sims


def observe(
    world: World,
    agent: AgentState,
    space: str,
    target_hist: Histogram3D,
    *,
    cell_colors: np.ndarray = None,
    cell_sims: np.ndarray = None,
    sim_map: np.ndarray = None,
) -> np.ndarray:
    """Score every cell in view and fold it into the similarity memory.

    Returns the (N,) similarity values of currently visible cells (zero
    elsewhere). Marks visible cells as visited. `cell_sims` may carry
    precomputed per-cell similarities; otherwise they are derived from
    `cell_colors` via backprojection.
    """
    if cell_sims is None:
        if cell_colors is None:
            flat = world.grid.reshape(-1)
            cell_colors = np.zeros((flat.size, 3))
            obj = flat >= 0
            cell_colors[obj] = palette.RGB[flat[obj]] / 255.0
        cell_sims = object_similarities(world, space, target_hist, cell_colors)
    h, w = world.shape
    vis = world.visibility(agent.view_range)
    row = _fov_filter(vis[agent.position[0] * w + agent.position[1]], agent, (h, w))
    if agent.visited is None:
        agent.visited = np.zeros(h * w, dtype=bool)
    agent.visited |= row
    seen = np.zeros(h * w)
    seen[row] = cell_sims[row]
    if sim_map is not None:
        sim_map[row] = cell_sims[row]
    return seen


def plan_next(
    agent: AgentState,
    sim_map: np.ndarray,
    world: World,
    *,
    alpha: float = 1.0,
    beta: float = 0.1,
) -> tuple:
    """Greedy next pose among reachable frontier and viewpoint cells.

    utility(c) = alpha * (remembered similarity visible from c)
               + beta * (count of unseen cells visible from c),
    ties broken toward the lowest flat cell index.
    """
    h, w = world.shape
    vis = world.visibility(agent.view_range)
    visited = agent.visited
    walkable = (world.grid == FREE).reshape(-1)

    known_free = walkable & visited
    reach = _reachable(world, agent.position, known_free)

    unseen = ~visited
    frontier = np.zeros(h * w, dtype=bool)
    cand_pool = np.flatnonzero(known_free & reach)
    for i in cand_pool:
        r, c = divmod(i, w)
        for dr, dc in MOVES:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and unseen[rr * w + cc]:
                frontier[i] = True
                break
    viewpoint = known_free & reach & (vis @ (sim_map > 0) > 0)
    cands = (frontier | viewpoint) & reach
    cands[agent.position[0] * w + agent.position[1]] = False
    idx = np.flatnonzero(cands)
    if len(idx) == 0:
        raise NoCandidatesError("no reachable frontier or viewpoint cells")
    utility = alpha * (vis[idx] @ sim_map) + beta * (vis[idx] @ unseen.astype(float))
    best = idx[int(np.argmax(utility))]  # argmax takes the first (lowest index) tie
    return divmod(best, w)


def _reachable(world: World, start: tuple, passable: np.ndarray) -> np.ndarray:
    h, w = world.shape
    reach = np.zeros(h * w, dtype=bool)
    s = start[0] * w + start[1]
    reach[s] = True
    q = deque([start])
    while q:
        r, c = q.popleft()
        for dr, dc in MOVES:
            rr, cc = r + dr, c + dc
            i = rr * w + cc
            if 0 <= rr < h and 0 <= cc < w and passable[i] and not reach[i]:
                reach[i] = True
                q.append((rr, cc))
    return reach


def _bfs_path(world: World, start: tuple, goal: tuple, passable: np.ndarray):
    h, w = world.shape
    prev = {start: None}
    q = deque([start])
    while q:
        cur = q.popleft()
        if cur == goal:
            path = []
            while cur is not None:
                path.append(cur)
                cur = prev[cur]
            return path[::-1]
        r, c = cur
        for dr, dc in MOVES:
            rr, cc = r + dr, c + dc
            nxt = (rr, cc)
            if (
                0 <= rr < h
                and 0 <= cc < w
                and passable[rr * w + cc]
                and nxt not in prev
            ):
                prev[nxt] = cur
                q.append(nxt)
    return None


def _detectable_map(world: World, detect_range: int) -> np.ndarray:
    """Cells from which some target cell is visible within detect range."""
    h, w = world.shape
    vis = world.visibility(detect_range)
    return vis @ world.target_mask.reshape(-1) > 0


def run_search(
    world: World,
    space: str,
    target_class: int,
    max_steps: int = 400,
    seed: int = 0,
    params: SearchParams = None,
) -> SearchResult:
    """Observe/plan/move loop until the target is within detect range.

    The RNG seed only drives the per-trial illumination noise on object
    cell colors; planning itself is deterministic.
    """
    params = params or SearchParams()
    world.validate()
    if target_class != world.target_class:
        raise ConfigError(
            f"world target class {world.target_class} != requested {target_class}"
        )

    tpl = Template(
        np.tile(palette.RGB[target_class], (8, 8, 1)).astype(np.uint8), target_class
    )
    tpl_px = normalize_pixelwise(tpl.pixels) if params.primed else tpl.pixels
    hist = build_histogram(
        Template(tpl_px, target_class),
        space,
        params.bins,
        normalized_input=params.primed,
    )

    rng = np.random.default_rng(seed)
    flat = world.grid.reshape(-1)
    cell_colors = np.zeros((flat.size, 3))
    obj = flat >= 0
    factors = np.ones(flat.size)
    if params.brightness_noise is not None:
        lo, hi = params.brightness_noise
        factors[obj] = rng.uniform(lo, hi, size=int(obj.sum()))
    cell_colors[obj] = palette.RGB[flat[obj]] / 255.0 * factors[obj, None]
    cell_sims = object_similarities(world, space, hist, cell_colors)

    h, w = world.shape
    start = world.starts[0]
    agent = AgentState(
        position=start,
        fov=params.fov,
        view_range=params.view_range,
        visited=np.zeros(h * w, dtype=bool),
    )
    sim_map = np.zeros(h * w)
    detectable = _detectable_map(world, params.detect_range)
    trajectory = [start]

    def at_goal():
        return detectable[agent.position[0] * w + agent.position[1]]

    observe(world, agent, space, hist, cell_sims=cell_sims, sim_map=sim_map)
    found = at_goal()
    while not found and agent.step_count < max_steps:
        try:
            goal = plan_next(
                agent, sim_map, world, alpha=params.alpha, beta=params.beta
            )
        except NoCandidatesError:
            break
        passable = (world.grid == FREE).reshape(-1) & agent.visited
        path = _bfs_path(world, agent.position, goal, passable)
        if path is None or len(path) < 2:
            break
        for cell in path[1:]:
            agent.position = cell
            agent.heading = math.atan2(
                -(cell[0] - trajectory[-1][0]), cell[1] - trajectory[-1][1]
            )
            agent.step_count += 1
            trajectory.append(cell)
            observe(world, agent, space, hist, cell_sims=cell_sims, sim_map=sim_map)
            if at_goal():
                found = True
                break
            if agent.step_count >= max_steps:
                break
    return SearchResult(found, agent.step_count, space, tuple(trajectory))


def with_start(world: World, start: tuple) -> World:
    """Same world, different primary start cell."""
    if world.grid[start[0], start[1]] != FREE:
        raise ConfigError(f"start {start} is not free")
    w = replace(world, starts=(tuple(start),) + tuple(world.starts))
    # share the visibility cache; the grid is identical
    w._vis_cache.update(world._vis_cache)
    return w
