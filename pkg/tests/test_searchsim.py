import math

import numpy as np
import pytest

from colorbench import palette, searchsim as ss
from colorbench.detect import Template, build_histogram
from colorbench.errors import ConfigError, NoCandidatesError


def small_world(rows, legend=None, starts=((1, 1),)):
    legend = legend or {
        ".": "free",
        "#": "obstacle",
        "T": {"class": 8, "target": True},
        "g": {"class": 6},
    }
    return ss.world_from_dict({"rows": rows, "legend": legend, "starts": list(starts)})


OPEN_ROWS = [
    "##########",
    "#........#",
    "#........#",
    "#...T....#",
    "#........#",
    "#......g.#",
    "#........#",
    "##########",
]


def target_hist(cls=8, space="C1C2C3", bins=16):
    tpl = Template(np.tile(palette.RGB[cls], (4, 4, 1)).astype(np.uint8), cls)
    return build_histogram(tpl, space, bins)


# ------------------------------------------------------------------- worlds


def test_world_parse_and_target():
    w = small_world(OPEN_ROWS)
    assert w.shape == (8, 10)
    assert w.target_class == 8
    assert w.target_mask.sum() == 1
    assert w.grid[5, 7] == 6


def test_world_bad_legend_char():
    with pytest.raises(ConfigError):
        small_world(["##", "#?"])


def test_world_requires_target():
    with pytest.raises(ConfigError):
        ss.world_from_dict(
            {"rows": ["..", ".."], "legend": {".": "free"}, "starts": [(0, 0)]}
        )


def test_benchmark_world_shape_and_starts():
    w = ss.benchmark_world()
    assert w.shape == (20, 20)
    assert len(w.starts) == 4
    assert w.target_class == palette.class_index("b")
    assert w.target_mask.sum() == 9


# ------------------------------------------------------------------ observe


def test_observe_target_in_clear_view_scores_one():
    w = small_world(OPEN_ROWS)
    agent = ss.AgentState(position=(1, 1), view_range=5)
    seen = ss.observe(w, agent, "C1C2C3", target_hist())
    h, wd = w.shape
    assert seen[3 * wd + 4] == 1.0
    assert agent.visited[3 * wd + 4]


def test_observe_all_free_region_scores_zero():
    rows = ["#####", "#...#", "#.T.#", "#####"]
    w = small_world(rows)
    agent = ss.AgentState(position=(1, 1), view_range=1)  # target out of range
    seen = ss.observe(w, agent, "C1C2C3", target_hist())
    assert seen.max() == 0.0


def test_observe_distractor_similarity_hand_computed():
    # target r=(255,0,0): C1C2C3 bins16 -> bin (15,0,0)
    # distractor g=(0,255,0): (0, pi/2, 0) -> bin (0,15,0); lookup = 0.0
    rows = ["#####", "#...#", "#T.g#", "#####"]
    legend = {
        ".": "free",
        "#": "obstacle",
        "T": {"class": 0, "target": True},
        "g": {"class": 6},
    }
    w = ss.world_from_dict({"rows": rows, "legend": legend, "starts": [(1, 1)]})
    agent = ss.AgentState(position=(1, 2), view_range=3)
    seen = ss.observe(w, agent, "C1C2C3", target_hist(cls=0, bins=16))
    h, wd = w.shape
    assert seen[2 * wd + 1] == 1.0  # the target cell itself
    assert seen[2 * wd + 3] == 0.0  # the green distractor


def test_observe_occlusion_blocks_sight():
    rows = ["#####", "#...#", "#.#T#", "#...#", "#####"]
    w = small_world(rows)
    agent = ss.AgentState(position=(2, 1), view_range=4)
    ss.observe(w, agent, "C1C2C3", target_hist())
    h, wd = w.shape
    assert not agent.visited[2 * wd + 3]  # wall at (2,2) hides (2,3)


# --------------------------------------------------------------------- plan


def test_plan_single_candidate():
    rows = ["#####", "#..T#", "#####"]
    w = small_world(rows)
    agent = ss.AgentState(position=(1, 1), view_range=1)
    sim = np.zeros(w.grid.size)
    ss.observe(w, agent, "C1C2C3", target_hist(), sim_map=sim)
    goal = ss.plan_next(agent, sim, w)
    assert goal == (1, 2)


def corridor_world():
    # symmetric corridor: the agent in the middle, unexplored stubs at both
    # ends, so the exploration terms of the two frontier candidates tie
    rows = [
        "###########",
        "#........T#",
        "###########",
    ]
    legend = {
        ".": "free",
        "#": "obstacle",
        "T": {"class": 8, "target": True},
    }
    return ss.world_from_dict(
        {"rows": rows, "legend": legend, "starts": [(1, 5)]}
    )


def test_plan_prefers_similarity_mass_on_tied_exploration():
    w = corridor_world()
    agent = ss.AgentState(position=(1, 5), view_range=2)
    sim = np.zeros(w.grid.size)
    ss.observe(w, agent, "C1C2C3", target_hist(), sim_map=sim)
    fake = sim.copy()
    fake[1 * w.shape[1] + 7] = 1.0  # remembered mass on the right side
    goal = ss.plan_next(agent, fake, w, alpha=1.0, beta=0.1)
    assert goal == (1, 7)


def test_plan_alpha_zero_is_pure_frontier():
    w = corridor_world()
    agent = ss.AgentState(position=(1, 5), view_range=2)
    sim = np.zeros(w.grid.size)
    ss.observe(w, agent, "C1C2C3", target_hist(), sim_map=sim)
    fake = sim.copy()
    fake[1 * w.shape[1] + 7] = 1.0
    # with the similarity term disabled the tie falls to the lowest index,
    # i.e. the left frontier, ignoring the remembered mass entirely
    without = ss.plan_next(agent, fake, w, alpha=0.0, beta=0.1)
    with_alpha = ss.plan_next(agent, fake, w, alpha=1.0, beta=0.1)
    assert without == (1, 3)
    assert with_alpha == (1, 7)


def test_plan_argmax_invariant_to_similarity_rescaling():
    w = corridor_world()
    agent = ss.AgentState(position=(1, 5), view_range=2)
    sim = np.zeros(w.grid.size)
    ss.observe(w, agent, "C1C2C3", target_hist(), sim_map=sim)
    sim[1 * w.shape[1] + 7] = 0.25
    base = ss.plan_next(agent, sim, w, alpha=1.0, beta=0.0)
    for scale in (0.5, 3.0, 100.0):
        assert ss.plan_next(agent, sim * scale, w, alpha=1.0, beta=0.0) == base


def test_plan_no_candidates_raises():
    rows = ["####", "#.T#", "####"]
    w = small_world(rows)
    agent = ss.AgentState(position=(1, 1), view_range=3)
    sim = np.zeros(w.grid.size)
    ss.observe(w, agent, "C1C2C3", target_hist(bins=16), sim_map=sim)
    sim[:] = 0.0  # pretend nothing looked similar
    with pytest.raises(NoCandidatesError):
        ss.plan_next(agent, sim, w)


# --------------------------------------------------------------- run_search


def test_search_target_adjacent_to_start():
    rows = ["#####", "#.T.#", "#...#", "#####"]
    w = small_world(rows)
    res = ss.run_search(w, "C1C2C3", 8, max_steps=50, seed=0)
    assert res.found
    assert res.steps <= ss.SearchParams().detect_range


def test_search_unreachable_target_not_found():
    rows = [
        "#######",
        "#..#T.#",
        "#..####",
        "#.....#",
        "#######",
    ]
    w = small_world(rows, starts=((1, 1),))
    res = ss.run_search(w, "C1C2C3", 8, max_steps=80, seed=0)
    assert not res.found


def test_search_trajectory_connected_and_counted():
    w = ss.benchmark_world()
    res = ss.run_search(w, "C1C2C3", w.target_class, max_steps=300, seed=1)
    assert res.found
    assert res.steps == len(res.trajectory) - 1
    for a, b in zip(res.trajectory, res.trajectory[1:]):
        assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1
        assert w.grid[b[0], b[1]] == ss.FREE


def test_search_deterministic():
    w = ss.benchmark_world()
    a = ss.run_search(w, "C1C2C3", w.target_class, max_steps=300, seed=3)
    b = ss.run_search(w, "C1C2C3", w.target_class, max_steps=300, seed=3)
    assert a.trajectory == b.trajectory
    assert a.steps == b.steps


def test_search_wrong_target_class_rejected():
    w = ss.benchmark_world()
    with pytest.raises(ConfigError):
        ss.run_search(w, "C1C2C3", 0, max_steps=10, seed=0)


def test_guided_beats_uninformed_on_benchmark_sample():
    w = ss.benchmark_world()
    guided, blind = [], []
    for start in w.starts:
        ws = ss.with_start(w, start)
        for seed in range(3):
            g = ss.run_search(ws, "C1C2C3", w.target_class, 400, seed,
                              ss.SearchParams(alpha=1.0))
            b = ss.run_search(ws, "C1C2C3", w.target_class, 400, seed,
                              ss.SearchParams(alpha=0.0))
            guided.append(g.steps if g.found else 400)
            blind.append(b.steps if b.found else 400)
    assert np.mean(guided) < np.mean(blind)


def test_approach_after_glimpse_on_benchmark():
    # once the target is glimpsed the agent closes in monotonically enough
    # to finish within detect range
    w = ss.benchmark_world()
    params = ss.SearchParams(alpha=1.0)
    vis = w.visibility(params.view_range)
    tflat = w.target_mask.reshape(-1)
    tgt = np.argwhere(w.target_mask)
    for start in w.starts:
        ws = ss.with_start(w, start)
        res = ss.run_search(ws, "C1C2C3", w.target_class, 400, 0, params)
        assert res.found
        wd = w.shape[1]
        glimpse = None
        for i, cell in enumerate(res.trajectory):
            if (vis[cell[0] * wd + cell[1]] & tflat).any():
                glimpse = i
                break
        assert glimpse is not None
        d_glimpse = np.sqrt(((tgt - res.trajectory[glimpse]) ** 2).sum(1)).min()
        d_final = np.sqrt(((tgt - res.trajectory[-1]) ** 2).sum(1)).min()
        assert d_final < d_glimpse or d_glimpse <= params.detect_range


def test_brightness_noise_does_not_affect_invariant_space():
    w = ss.benchmark_world()
    p = ss.SearchParams(alpha=1.0)
    runs = {
        seed: ss.run_search(w, "C1C2C3", w.target_class, 400, seed, p).steps
        for seed in (0, 1, 2)
    }
    assert len(set(runs.values())) == 1
