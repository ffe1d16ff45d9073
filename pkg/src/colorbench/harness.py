"""Experiment sweeps: detection, clustering and search over color spaces.

Produces the raw CSV row streams plus ranking reports. All outputs are
deterministic: rows are emitted in sorted key order and floats use a
fixed format, so a rerun with the same config is byte-identical.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import cluster as _cluster
from . import detect as _detect
from . import palette
from . import searchsim as _search
from .colorspace import SPACE_NAMES, convert, normalize_pixelwise
from .errors import ConfigError, CorpusError, MissingInputError
from .imgio import load_label_png, load_rgb_png

SCHEMA_VERSION = 1

DETECT_CSV_FIELDS = (
    "space",
    "primed",
    "bins",
    "tau",
    "image",
    "class",
    "tp",
    "fp",
    "fn",
    "recall",
    "precision",
    "fmeasure",
)

CLUSTER_CSV_FIELDS = (
    "space",
    "primed",
    "image",
    "k",
    "n_sampled",
    "mean_silhouette",
    "flagged",
)

SEARCH_CSV_FIELDS = (
    "space",
    "primed",
    "alpha",
    "seed",
    "start",
    "steps",
    "found",
)


def fmt(x) -> str:
    """Fixed float formatting shared by every CSV/JSON writer."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def space_label(space: str, primed: bool) -> str:
    return f"{space}'" if primed else space


def parse_spaces(spec) -> list[tuple[str, bool]]:
    """Space list: 'all', or comma string / sequence of names, trailing
    apostrophe marking the primed (pixel-wise normalized) variant."""
    if spec in (None, "all"):
        return [(s, p) for p in (False, True) for s in SPACE_NAMES]
    if isinstance(spec, str):
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    out = []
    for item in spec:
        if isinstance(item, (list, tuple)):
            name, primed = item[0], bool(item[1])
        else:
            primed = item.endswith("'")
            name = item.rstrip("'")
        if name not in SPACE_NAMES:
            raise ConfigError(f"unknown color space {name!r}")
        out.append((name, primed))
    return out


# --------------------------------------------------------------------------
# corpus + templates
# --------------------------------------------------------------------------


def discover_corpus(corpus_dir) -> list[tuple[str, Path, Path]]:
    """Sorted (stem, image path, label path) pairs of a corpus directory."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise CorpusError(f"corpus directory {root} does not exist")
    pairs = []
    for img in sorted(root.glob("*_img.png")):
        stem = img.name[: -len("_img.png")]
        lbl = root / f"{stem}_label.png"
        if not lbl.exists():
            raise CorpusError(f"{img.name} has no matching {lbl.name}")
        pairs.append((stem, img, lbl))
    if not pairs:
        raise CorpusError(f"no *_img.png files under {root}")
    return pairs


def _check_pair(img: np.ndarray, lbl: np.ndarray, stem: str) -> None:
    if img.shape[:2] != lbl.shape:
        raise CorpusError(
            f"{stem}: image {img.shape[:2]} vs label {lbl.shape} size mismatch"
        )


def reference_templates(
    img: np.ndarray, labels: np.ndarray, max_pixels: int = 2048
) -> list[_detect.Template]:
    """Cut one template per class present from a reference image pair."""
    tpls = []
    for c in np.unique(labels[labels != palette.BACKGROUND]):
        px = img[labels == c]
        sel = px[np.linspace(0, len(px) - 1, min(len(px), max_pixels)).astype(int)]
        tpls.append(_detect.Template(sel.reshape(-1, 1, 3), int(c)))
    return tpls


def load_template_dir(path) -> list[_detect.Template]:
    """Templates from `<class-name>_template.png` files (wheel names)."""
    root = Path(path)
    tpls = []
    for c, name in enumerate(palette.NAMES):
        f = root / f"{name}_template.png"
        if f.exists():
            tpls.append(_detect.Template(load_rgb_png(f), c))
    if not tpls:
        raise CorpusError(f"no *_template.png files under {root}")
    return tpls


def resolve_templates(source, pairs) -> list[_detect.Template]:
    """Template source: 'auto', 'checker', 'reference', or a directory.

    'auto' cuts templates from the first image of a generated corpus (a
    manifest.json sits next to it) and falls back to the built-in color
    checker for arbitrary corpora.
    """
    if source in (None, "auto"):
        manifest = pairs[0][1].parent / "manifest.json"
        source = "reference" if manifest.exists() else "checker"
    if source == "checker":
        return _detect.checker_templates()
    if source == "reference":
        stem, img_p, lbl_p = pairs[0]
        img, lbl = load_rgb_png(img_p), load_label_png(lbl_p)
        _check_pair(img, lbl, stem)
        return reference_templates(img, lbl)
    return load_template_dir(source)


# --------------------------------------------------------------------------
# detection sweep
# --------------------------------------------------------------------------


def _detect_rows_one_space(args):
    space, primed, pair_paths, tpl_data, bins_list, tau = args
    templates = [_detect.Template(px, c) for px, c in tpl_data]
    tpx = [
        normalize_pixelwise(t.pixels) if primed else t.pixels for t in templates
    ]
    hists = {
        bins: [
            _detect.build_histogram(
                _detect.Template(px, t.color_class),
                space,
                bins,
                normalized_input=primed,
            )
            for px, t in zip(tpx, templates)
        ]
        for bins in bins_list
    }
    rows = []
    for stem, img_p, lbl_p in pair_paths:
        img = load_rgb_png(img_p)
        lbl = load_label_png(lbl_p)
        _check_pair(img, lbl, stem)
        inp = normalize_pixelwise(img) if primed else img
        plane = convert(inp, space, normalized_input=primed)
        for bins in bins_list:
            flat = _detect.quantize(plane, bins)
            for h, t in zip(hists[bins], templates):
                s = _detect.score(h.lookup(flat) >= tau, lbl, t.color_class)
                rows.append(
                    {
                        "space": space,
                        "primed": primed,
                        "bins": bins,
                        "tau": tau,
                        "image": stem,
                        "class": palette.NAMES[t.color_class],
                        "tp": s.true_pos,
                        "fp": s.false_pos,
                        "fn": s.false_neg,
                        "recall": s.recall,
                        "precision": s.precision,
                        "fmeasure": s.fmeasure,
                    }
                )
    return rows


def eval_detect(
    corpus_dir,
    out_dir,
    *,
    spaces="all",
    bins_list=_detect.BIN_SIZES,
    tau: float = 0.5,
    templates="auto",
    jobs: int = 1,
) -> dict:
    """Full detection sweep; writes detect.csv and detect_ranking.json."""
    for b in bins_list:
        if b not in _detect.BIN_SIZES:
            raise ConfigError(f"bins {b} not in {_detect.BIN_SIZES}")
    if not 0.0 <= tau <= 1.0:
        raise ConfigError(f"tau {tau} outside [0, 1]")
    pairs = discover_corpus(corpus_dir)
    space_list = parse_spaces(spaces)
    tpls = resolve_templates(templates, pairs)
    tpl_data = [(t.pixels, t.color_class) for t in tpls]

    work = [
        (space, primed, pairs, tpl_data, tuple(bins_list), tau)
        for space, primed in space_list
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_detect_rows_one_space, work))
    else:
        chunks = [_detect_rows_one_space(w) for w in work]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r["space"], r["primed"], r["bins"], r["image"], r["class"]))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "detect.csv", DETECT_CSV_FIELDS, rows)
    ranking = detect_ranking(rows)
    _write_json(out / "detect_ranking.json", ranking)
    return ranking


def detect_ranking(rows: list[dict]) -> dict:
    """Aggregate raw detection rows into the ranking report."""
    by_cfg = {}
    for r in rows:
        by_cfg.setdefault((r["space"], r["primed"]), []).append(r)

    configs = []
    for (space, primed), rs in by_cfg.items():
        per_class = {}
        for name in palette.NAMES:
            cls_rows = [r for r in rs if r["class"] == name]
            if cls_rows:
                per_class[name] = {
                    m: sum(r[m] for r in cls_rows) / len(cls_rows)
                    for m in ("recall", "precision", "fmeasure")
                }
        configs.append(
            {
                "space": space,
                "primed": primed,
                "label": space_label(space, primed),
                "recall": sum(r["recall"] for r in rs) / len(rs),
                "precision": sum(r["precision"] for r in rs) / len(rs),
                "fmeasure": sum(r["fmeasure"] for r in rs) / len(rs),
                "per_class": per_class,
            }
        )
    configs.sort(key=lambda c: (-c["fmeasure"], c["label"]))
    for i, c in enumerate(configs):
        c["rank"] = i + 1

    top3 = {}
    class_names = sorted({r["class"] for r in rows})
    for name in class_names:
        entry = {}
        for metric in ("recall", "precision", "fmeasure"):
            ordered = sorted(
                (c for c in configs if name in c["per_class"]),
                key=lambda c: (-c["per_class"][name][metric], c["label"]),
            )
            entry[metric] = [c["label"] for c in ordered[:3]]
            entry[f"best_{metric}"] = (
                ordered[0]["per_class"][name][metric] if ordered else 0.0
            )
        top3[name] = entry

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "detect",
        "configs": configs,
        "top3_per_class": top3,
    }


# --------------------------------------------------------------------------
# clustering sweep
# --------------------------------------------------------------------------


def _cluster_rows_one_space(args):
    space, primed, pair_paths, seed, sample_size = args
    rows = []
    for stem, img_p, lbl_p in pair_paths:
        img = load_rgb_png(img_p)
        lbl = load_label_png(lbl_p)
        _check_pair(img, lbl, stem)
        inp = normalize_pixelwise(img) if primed else img
        plane = convert(inp, space, normalized_input=primed)
        rep = _cluster.discriminability(plane, lbl, seed, sample_size=sample_size)
        rows.append(
            {
                "space": space,
                "primed": primed,
                "image": stem,
                "k": rep.k,
                "n_sampled": rep.n_samples,
                "mean_silhouette": rep.mean,
                "flagged": rep.flagged_single_cluster,
            }
        )
    return rows


def eval_cluster(
    corpus_dir,
    out_dir,
    *,
    spaces="all",
    seed: int = 0,
    sample_size: int = _cluster.DEFAULT_SAMPLE,
    jobs: int = 1,
) -> dict:
    """Silhouette sweep; writes cluster.csv and cluster_ranking.json."""
    pairs = discover_corpus(corpus_dir)
    space_list = parse_spaces(spaces)
    work = [(s, p, pairs, seed, sample_size) for s, p in space_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_cluster_rows_one_space, work))
    else:
        chunks = [_cluster_rows_one_space(w) for w in work]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r["space"], r["primed"], r["image"]))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "cluster.csv", CLUSTER_CSV_FIELDS, rows)
    ranking = cluster_ranking(rows, seed=seed, sample_size=sample_size)
    _write_json(out / "cluster_ranking.json", ranking)
    return ranking


def cluster_ranking(rows: list[dict], *, seed=0, sample_size=0) -> dict:
    by_cfg = {}
    for r in rows:
        by_cfg.setdefault((r["space"], r["primed"]), []).append(r)
    configs = []
    for (space, primed), rs in by_cfg.items():
        usable = [r for r in rs if not r["flagged"]]
        mean = (
            sum(r["mean_silhouette"] for r in usable) / len(usable) if usable else 0.0
        )
        configs.append(
            {
                "space": space,
                "primed": primed,
                "label": space_label(space, primed),
                "mean_silhouette": mean,
                "n_images": len(usable),
                "n_flagged": len(rs) - len(usable),
            }
        )
    configs.sort(key=lambda c: (-c["mean_silhouette"], c["label"]))
    for i, c in enumerate(configs):
        c["rank"] = i + 1
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "cluster",
        "seed": seed,
        "sample_size": sample_size,
        "configs": configs,
    }


# --------------------------------------------------------------------------
# search sweep
# --------------------------------------------------------------------------


def run_search_sweep(
    world_source,
    out_dir,
    *,
    spaces="C1C2C3",
    alphas=(1.0, 0.0),
    n_seeds: int = 50,
    max_steps: int = 400,
    params: _search.SearchParams = None,
) -> dict:
    """Search trials over spaces x alphas x seeds x starts.

    Writes search.csv and search_summary.json. Unfound trials count
    max_steps toward the means.
    """
    if world_source in (None, "benchmark"):
        world = _search.benchmark_world()
    elif isinstance(world_source, _search.World):
        world = world_source
    else:
        world = _search.load_world(world_source)
    base = params or _search.SearchParams()
    space_list = parse_spaces(spaces)

    rows = []
    for space, primed in space_list:
        for alpha in alphas:
            p = _search.SearchParams(
                alpha=alpha,
                beta=base.beta,
                view_range=base.view_range,
                detect_range=base.detect_range,
                fov=base.fov,
                bins=base.bins,
                brightness_noise=base.brightness_noise,
                primed=primed,
            )
            for start in world.starts:
                ws = _search.with_start(world, start)
                for seed in range(n_seeds):
                    res = _search.run_search(
                        ws, space, world.target_class, max_steps, seed, p
                    )
                    rows.append(
                        {
                            "space": space,
                            "primed": primed,
                            "alpha": alpha,
                            "seed": seed,
                            "start": f"{start[0]}:{start[1]}",
                            "steps": res.steps if res.found else max_steps,
                            "found": res.found,
                        }
                    )
    rows.sort(
        key=lambda r: (r["space"], r["primed"], -r["alpha"], r["start"], r["seed"])
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "search.csv", SEARCH_CSV_FIELDS, rows)
    summary = search_summary(rows)
    _write_json(out / "search_summary.json", summary)
    return summary


def search_summary(rows: list[dict]) -> dict:
    by_cfg = {}
    for r in rows:
        by_cfg.setdefault((r["space"], r["primed"], r["alpha"]), []).append(r)
    configs = []
    for (space, primed, alpha), rs in by_cfg.items():
        configs.append(
            {
                "space": space,
                "primed": primed,
                "label": space_label(space, primed),
                "alpha": alpha,
                "mean_steps": sum(r["steps"] for r in rs) / len(rs),
                "found_rate": sum(1 for r in rs if r["found"]) / len(rs),
                "n_trials": len(rs),
            }
        )
    configs.sort(key=lambda c: (c["alpha"] == 0.0, c["mean_steps"], c["label"]))
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "search",
        "configs": configs,
    }


# --------------------------------------------------------------------------
# merged report
# --------------------------------------------------------------------------


def merge_report(out_dir, *, detect_path=None, cluster_path=None, search_path=None) -> dict:
    """Combine available ranking outputs into report.json + plot CSV."""
    out = Path(out_dir)

    def _load(explicit, default_name):
        p = Path(explicit) if explicit else out / default_name
        if p.exists():
            with open(p) as fh:
                return json.load(fh)
        return None

    detection = _load(detect_path, "detect_ranking.json")
    clustering = _load(cluster_path, "cluster_ranking.json")
    search = _load(search_path, "search_summary.json")
    if detection is None and clustering is None and search is None:
        raise MissingInputError(
            "no detect_ranking.json / cluster_ranking.json / search_summary.json found"
        )
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "combined",
        "detection": detection,
        "clustering": clustering,
        "search": search,
    }
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report)

    plot_rows = []
    if detection:
        for c in detection["configs"]:
            for m in ("recall", "precision", "fmeasure"):
                plot_rows.append(
                    {
                        "section": "detect",
                        "space": c["space"],
                        "primed": c["primed"],
                        "metric": m,
                        "value": c[m],
                    }
                )
    if clustering:
        for c in clustering["configs"]:
            plot_rows.append(
                {
                    "section": "cluster",
                    "space": c["space"],
                    "primed": c["primed"],
                    "metric": "mean_silhouette",
                    "value": c["mean_silhouette"],
                }
            )
    if search:
        for c in search["configs"]:
            plot_rows.append(
                {
                    "section": "search",
                    "space": c["space"],
                    "primed": c["primed"],
                    "metric": f"mean_steps_alpha{fmt(c['alpha'])}",
                    "value": c["mean_steps"],
                }
            )
    plot_rows.sort(key=lambda r: (r["section"], r["space"], r["primed"], r["metric"]))
    _write_csv(
        out / "report_plotdata.csv",
        ("section", "space", "primed", "metric", "value"),
        plot_rows,
    )
    return report


# --------------------------------------------------------------------------
# writers
# --------------------------------------------------------------------------


def _write_csv(path, fields, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for r in rows:
            writer.writerow([fmt(r[f]) for f in fields])


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
