import csv
import json

import numpy as np
import pytest

from colorbench import detect, harness, palette
from colorbench.errors import ConfigError, CorpusError, MissingInputError


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_spaces_forms():
    assert harness.parse_spaces("RGB,HSI'") == [("RGB", False), ("HSI", True)]
    assert harness.parse_spaces([("Lab", True)]) == [("Lab", True)]
    assert len(harness.parse_spaces("all")) == 42
    with pytest.raises(ConfigError):
        harness.parse_spaces("NotASpace")


def test_discover_corpus_errors(tmp_path):
    with pytest.raises(CorpusError):
        harness.discover_corpus(tmp_path / "missing")
    (tmp_path / "c").mkdir()
    with pytest.raises(CorpusError):
        harness.discover_corpus(tmp_path / "c")
    (tmp_path / "c" / "0000_img.png").write_bytes(b"x")
    with pytest.raises(CorpusError):
        harness.discover_corpus(tmp_path / "c")  # unpaired image


def test_detect_csv_row_count_contract(mini_corpus, tmp_path):
    harness.eval_detect(
        mini_corpus,
        tmp_path,
        spaces="RGB,RGB',C1C2C3",
        bins_list=(16, 32),
        tau=0.5,
    )
    rows = read_csv(tmp_path / "detect.csv")
    n_images = 4
    n_classes = 12
    assert len(rows) == 3 * 2 * n_images * n_classes
    assert set(rows[0]) == set(harness.DETECT_CSV_FIELDS)


def test_detect_aggregates_match_raw_rows(mini_corpus, tmp_path):
    ranking = harness.eval_detect(
        mini_corpus, tmp_path, spaces="RGB,rg'", bins_list=(16, 32), tau=0.5
    )
    rows = read_csv(tmp_path / "detect.csv")
    for cfg in ranking["configs"]:
        sel = [
            float(r["fmeasure"])
            for r in rows
            if r["space"] == cfg["space"]
            and (r["primed"] == "true") == cfg["primed"]
        ]
        assert np.mean(sel) == pytest.approx(cfg["fmeasure"], abs=1e-9)


def test_detect_primed_flag_reflects_pipeline(mini_corpus, tmp_path):
    # rg is scale invariant, so the primed run must reproduce the plain one;
    # RGB is not, so priming must change its scores
    harness.eval_detect(
        mini_corpus, tmp_path, spaces="rg,rg',RGB,RGB'", bins_list=(16,), tau=0.5
    )
    rows = read_csv(tmp_path / "detect.csv")

    def fvec(space, primed):
        return [
            float(r["fmeasure"])
            for r in rows
            if r["space"] == space and r["primed"] == primed
        ]

    assert fvec("rg", "true") == pytest.approx(fvec("rg", "false"), abs=1e-9)
    assert fvec("RGB", "true") != pytest.approx(fvec("RGB", "false"))


def test_detect_top3_structure(mini_corpus, tmp_path):
    ranking = harness.eval_detect(
        mini_corpus, tmp_path, spaces="RGB,C1C2C3", bins_list=(16,), tau=0.5
    )
    assert ranking["schema_version"] == 1
    ranks = [c["rank"] for c in ranking["configs"]]
    assert sorted(ranks) == list(range(1, len(ranks) + 1))
    for entry in ranking["top3_per_class"].values():
        for metric in ("recall", "precision", "fmeasure"):
            assert len(entry[metric]) <= 3


def test_detect_jobs_parallel_equals_serial(mini_corpus, tmp_path):
    harness.eval_detect(
        mini_corpus, tmp_path / "s", spaces="RGB,C1C2C3'", bins_list=(16,), tau=0.5
    )
    harness.eval_detect(
        mini_corpus,
        tmp_path / "p",
        spaces="RGB,C1C2C3'",
        bins_list=(16,),
        tau=0.5,
        jobs=2,
    )
    assert (tmp_path / "s" / "detect.csv").read_bytes() == (
        tmp_path / "p" / "detect.csv"
    ).read_bytes()
    assert (tmp_path / "s" / "detect_ranking.json").read_bytes() == (
        tmp_path / "p" / "detect_ranking.json"
    ).read_bytes()


def test_detect_bad_config(mini_corpus, tmp_path):
    with pytest.raises(ConfigError):
        harness.eval_detect(mini_corpus, tmp_path, bins_list=(20,))
    with pytest.raises(ConfigError):
        harness.eval_detect(mini_corpus, tmp_path, tau=1.5)


def test_reference_templates_from_corpus(mini_corpus, tmp_path):
    pairs = harness.discover_corpus(mini_corpus)
    tpls = harness.resolve_templates("auto", pairs)  # manifest -> reference
    assert all(isinstance(t, detect.Template) for t in tpls)
    assert len(tpls) >= 4
    checker = harness.resolve_templates("checker", pairs)
    assert len(checker) == 12


def test_template_dir_round_trip(tmp_path, mini_corpus):
    from colorbench.imgio import save_rgb_png

    d = tmp_path / "tpl"
    d.mkdir()
    for tpl in detect.checker_templates(size=8):
        save_rgb_png(d / f"{palette.NAMES[tpl.color_class]}_template.png", tpl.pixels)
    pairs = harness.discover_corpus(mini_corpus)
    tpls = harness.resolve_templates(d, pairs)
    assert len(tpls) == 12
    with pytest.raises(CorpusError):
        harness.resolve_templates(tmp_path / "empty", pairs)


def test_eval_cluster_rows_and_ranking(mini_corpus, tmp_path):
    ranking = harness.eval_cluster(
        mini_corpus, tmp_path, spaces="RGB,RGB',C1C2C3", seed=0, sample_size=300
    )
    rows = read_csv(tmp_path / "cluster.csv")
    assert len(rows) == 3 * 4
    assert set(rows[0]) == set(harness.CLUSTER_CSV_FIELDS)
    labels = {c["label"] for c in ranking["configs"]}
    assert {"RGB", "RGB'", "C1C2C3"} == labels  # original and normalized side by side
    for cfg in ranking["configs"]:
        sel = [
            float(r["mean_silhouette"])
            for r in rows
            if r["space"] == cfg["space"]
            and (r["primed"] == "true") == cfg["primed"]
            and r["flagged"] == "false"
        ]
        assert np.mean(sel) == pytest.approx(cfg["mean_silhouette"], abs=1e-9)


def test_search_sweep_rows_and_baseline(tmp_path):
    summary = harness.run_search_sweep(
        "benchmark",
        tmp_path,
        spaces="C1C2C3",
        alphas=(1.0, 0.0),
        n_seeds=2,
        max_steps=300,
    )
    rows = read_csv(tmp_path / "search.csv")
    assert len(rows) == 2 * 2 * 4  # alphas x seeds x starts
    assert set(rows[0]) == set(harness.SEARCH_CSV_FIELDS)
    alphas = {c["alpha"] for c in summary["configs"]}
    assert alphas == {1.0, 0.0}
    for cfg in summary["configs"]:
        sel = [
            int(r["steps"])
            for r in rows
            if r["space"] == cfg["space"] and float(r["alpha"]) == cfg["alpha"]
        ]
        assert np.mean(sel) == pytest.approx(cfg["mean_steps"], abs=1e-9)


def test_report_merge_full_and_partial(mini_corpus, tmp_path):
    harness.eval_detect(
        mini_corpus, tmp_path, spaces="RGB", bins_list=(16,), tau=0.5
    )
    report = harness.merge_report(tmp_path)
    assert report["schema_version"] == 1
    assert report["detection"] is not None
    assert report["clustering"] is None and report["search"] is None
    with open(tmp_path / "report.json") as fh:
        loaded = json.load(fh)
    assert loaded["kind"] == "combined"
    plot = read_csv(tmp_path / "report_plotdata.csv")
    assert {r["section"] for r in plot} == {"detect"}


def test_report_merge_missing_everything(tmp_path):
    with pytest.raises(MissingInputError):
        harness.merge_report(tmp_path / "void")
