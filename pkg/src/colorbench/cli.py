"""Command-line harness for the color space experiments.

Subcommands: gen, templates, eval-detect, eval-cluster, search, report.
Exit codes: 0 success, 2 configuration error, 3 corpus error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import detect, harness, palette, scenegen, searchsim
from .errors import ColorbenchError, ConfigError, CorpusError, MissingInputError
from .imgio import save_rgb_png


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def _pick(args, cfg: dict, key: str, default):
    """CLI flag beats config file beats default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    return cfg.get(key, default)


def cmd_gen(args) -> int:
    cfg = _load_config(args.config)
    if args.preset == "desk":
        configs = [scenegen.desk_preset()]
    elif args.preset == "paper":
        configs = scenegen.paper_preset()
    elif cfg:
        configs = [scenegen.config_from_dict(cfg)]
    else:
        raise ConfigError("gen needs --preset desk|paper or --config scene.json")
    manifest = scenegen.generate_dataset(configs, args.out)
    print(f"wrote {len(manifest['files'])} image/label pairs to {args.out}")
    return 0


def cmd_templates(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for tpl in detect.checker_templates(size=args.size):
        name = palette.NAMES[tpl.color_class]
        save_rgb_png(out / f"{name}_template.png", tpl.pixels)
    index = {
        "schema_version": harness.SCHEMA_VERSION,
        "size": args.size,
        "classes": [
            {"index": i, "name": n, "rgb": [int(v) for v in palette.RGB[i]]}
            for i, n in enumerate(palette.NAMES)
        ],
    }
    with open(out / "templates.json", "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {palette.N_CLASSES} checker templates to {out}")
    return 0


def cmd_eval_detect(args) -> int:
    cfg = _load_config(args.config)
    bins = _pick(args, cfg, "bins", list(detect.BIN_SIZES))
    if isinstance(bins, str):
        bins = [int(b) for b in bins.split(",")]
    ranking = harness.eval_detect(
        _pick(args, cfg, "corpus", None) or _fail_corpus(),
        args.out,
        spaces=_pick(args, cfg, "spaces", "all"),
        bins_list=tuple(bins),
        tau=float(_pick(args, cfg, "tau", 0.5)),
        templates=_pick(args, cfg, "templates", "auto"),
        jobs=int(_pick(args, cfg, "jobs", 1)),
    )
    best = ranking["configs"][0]
    print(
        f"wrote detect.csv + detect_ranking.json; best F-measure "
        f"{best['label']} = {harness.fmt(best['fmeasure'])}"
    )
    return 0


def cmd_eval_cluster(args) -> int:
    cfg = _load_config(args.config)
    ranking = harness.eval_cluster(
        _pick(args, cfg, "corpus", None) or _fail_corpus(),
        args.out,
        spaces=_pick(args, cfg, "spaces", "all"),
        seed=int(_pick(args, cfg, "seed", 0)),
        sample_size=int(_pick(args, cfg, "sample-size", 2000)),
        jobs=int(_pick(args, cfg, "jobs", 1)),
    )
    best = ranking["configs"][0]
    print(
        f"wrote cluster.csv + cluster_ranking.json; best silhouette "
        f"{best['label']} = {harness.fmt(best['mean_silhouette'])}"
    )
    return 0


def cmd_search(args) -> int:
    cfg = _load_config(args.config)
    alphas = _pick(args, cfg, "alphas", "1.0,0.0")
    if isinstance(alphas, str):
        alphas = [float(a) for a in alphas.split(",")]
    params = searchsim.SearchParams(
        beta=float(_pick(args, cfg, "beta", 0.1)),
        view_range=int(_pick(args, cfg, "view-range", 5)),
        detect_range=int(_pick(args, cfg, "detect-range", 2)),
        bins=int(_pick(args, cfg, "bins", 32)),
    )
    summary = harness.run_search_sweep(
        _pick(args, cfg, "world", "benchmark"),
        args.out,
        spaces=_pick(args, cfg, "spaces", "C1C2C3"),
        alphas=tuple(alphas),
        n_seeds=int(_pick(args, cfg, "seeds", 50)),
        max_steps=int(_pick(args, cfg, "max-steps", 400)),
        params=params,
    )
    best = summary["configs"][0]
    print(
        f"wrote search.csv + search_summary.json; best mean steps "
        f"{best['label']} alpha={harness.fmt(best['alpha'])} = "
        f"{harness.fmt(best['mean_steps'])}"
    )
    return 0


def cmd_report(args) -> int:
    harness.merge_report(
        args.out,
        detect_path=args.detect,
        cluster_path=args.cluster,
        search_path=args.search,
    )
    print(f"wrote report.json + report_plotdata.csv to {args.out}")
    return 0


def _fail_corpus():
    raise ConfigError("--corpus (or config key 'corpus') is required")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="colorbench",
        description="Color space detectability/discriminability experiments",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="render a synthetic corpus")
    p.add_argument("--preset", choices=("desk", "paper"))
    p.add_argument("--config", help="scene config JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("templates", help="write the built-in color checker")
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int, default=32)
    p.set_defaults(func=cmd_templates)

    p = sub.add_parser("eval-detect", help="backprojection detection sweep")
    p.add_argument("--config")
    p.add_argument("--corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--spaces")
    p.add_argument("--bins")
    p.add_argument("--tau", type=float)
    p.add_argument("--templates")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_eval_detect)

    p = sub.add_parser("eval-cluster", help="silhouette discriminability sweep")
    p.add_argument("--config")
    p.add_argument("--corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--spaces")
    p.add_argument("--seed", type=int)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_eval_cluster)

    p = sub.add_parser("search", help="grid-world visual search sweep")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--world", help="'benchmark' or world JSON path")
    p.add_argument("--spaces")
    p.add_argument("--alphas")
    p.add_argument("--beta", type=float)
    p.add_argument("--seeds", type=int)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--view-range", type=int)
    p.add_argument("--detect-range", type=int)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", help="merge sweep outputs into one report")
    p.add_argument("--out", required=True)
    p.add_argument("--detect", help="detect_ranking.json path override")
    p.add_argument("--cluster", help="cluster_ranking.json path override")
    p.add_argument("--search", help="search_summary.json path override")
    p.set_defaults(func=cmd_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (CorpusError, MissingInputError) as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return 3
    except ColorbenchError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
