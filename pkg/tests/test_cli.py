import csv

import numpy as np
import pytest

from chplane.cli import main
from chplane.features import EmbeddingTable, RawFeatures, read_chemb, read_chfeat, write_chemb, write_chfeat
from chplane.image_io import load_manifest
from chplane.synthetic import write_stub_features


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# exchange formats
# ---------------------------------------------------------------------------

def test_chfeat_round_trip(tmp_path, rng):
    feats = RawFeatures(
        ids=["one", "two", "drei"],
        low=rng.random((3, 10)).astype(np.float32),
        high=rng.random((3, 4)).astype(np.float32),
    )
    path = tmp_path / "f.chfeat"
    write_chfeat(path, feats)
    back = read_chfeat(path)
    assert back.ids == feats.ids
    assert np.array_equal(back.low, feats.low)
    assert np.array_equal(back.high, feats.high)


def test_chemb_round_trip(tmp_path, rng):
    table = EmbeddingTable(ids=["a", "b"], vectors=rng.random((2, 20)).astype(np.float32))
    path = tmp_path / "e.chemb"
    write_chemb(path, table)
    back = read_chemb(path)
    assert back.ids == table.ids
    assert np.array_equal(back.vectors, table.vectors)


def test_chfeat_bad_magic(tmp_path):
    path = tmp_path / "junk.chfeat"
    path.write_bytes(b"XXXX" + b"\x00" * 12)
    with pytest.raises(ValueError):
        read_chfeat(path)


# ---------------------------------------------------------------------------
# pipeline commands
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def pipeline(tmp_path_factory, mini_corpus):
    """Run the full pipeline once; commands under test read its artifacts."""
    out = tmp_path_factory.mktemp("pipeline")
    metrics = out / "metrics.csv"
    assert main(["ch", "--manifest", str(mini_corpus), "--out", str(metrics)]) == 0
    cache = out / "cache"
    assert main(["sift-cache", "--manifest", str(mini_corpus), "--cache-dir", str(cache)]) == 0
    raw = out / "raw.chfeat"
    write_stub_features(load_manifest(mini_corpus), raw)
    emb = out / "emb.chemb"
    assert (
        main(
            [
                "embed-ingest",
                "--features",
                str(raw),
                "--out",
                str(emb),
                "--components",
                "8",
                "--manifest",
                str(mini_corpus),
            ]
        )
        == 0
    )
    return {"out": out, "metrics": metrics, "cache": cache, "raw": raw, "emb": emb}


def test_ch_metrics_schema_and_order(pipeline, mini_corpus):
    rows = _read_rows(pipeline["metrics"])
    records = load_manifest(mini_corpus)
    assert list(rows[0]) == ["id", "group", "year", "h", "c", "width", "height", "window_count"]
    assert [r["id"] for r in rows] == [rec.id for rec in records]
    for row in rows:
        assert 0.0 <= float(row["h"]) <= 1.0
        assert 0.0 <= float(row["c"]) <= 1.0


def test_ch_corrupt_image_is_partial(tmp_path, mini_corpus):
    src = load_manifest(mini_corpus)
    broken_dir = tmp_path / "broken"
    broken_dir.mkdir()
    bad = broken_dir / "bad.png"
    bad.write_bytes(b"not a png at all")
    manifest = tmp_path / "manifest.csv"
    lines = ["id,path,group,year,fields"]
    lines.append(f"ok1,{src[0].path},g,2010,")
    lines.append(f"bad,{bad},g,2011,")
    lines.append(f"ok2,{src[1].path},g,2012,")
    manifest.write_text("\n".join(lines) + "\n")
    out = tmp_path / "metrics.csv"
    rc = main(["ch", "--manifest", str(manifest), "--out", str(out)])
    assert rc == 2  # partial: corrupt image logged, run completed
    rows = _read_rows(out)
    assert [r["id"] for r in rows] == ["ok1", "ok2"]


def test_ch_jobs_flag_does_not_change_output(tmp_path, mini_corpus):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["ch", "--manifest", str(mini_corpus), "--out", str(a), "--jobs", "1"]) == 0
    assert main(["ch", "--manifest", str(mini_corpus), "--out", str(b), "--jobs", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bounds_csv(tmp_path):
    out = tmp_path / "bounds.csv"
    assert main(["bounds", "--n", "24", "--resolution", "50", "--out", str(out)]) == 0
    rows = _read_rows(out)
    lower = [r for r in rows if r["curve"] == "lower"]
    upper = [r for r in rows if r["curve"] == "upper"]
    assert len(lower) == 50 and len(upper) == 50
    for lo, up in zip(lower, upper):
        assert lo["h"] == up["h"]
        assert float(lo["c"]) <= float(up["c"]) + 1e-12


def test_diversity_heatmap(pipeline, tmp_path):
    out = tmp_path / "heat.csv"
    rc = main(
        [
            "diversity",
            "--metrics",
            str(pipeline["metrics"]),
            "--embeddings",
            str(pipeline["emb"]),
            "--sift-cache",
            str(pipeline["cache"]),
            "--out",
            str(out),
            "--group",
            "gallery-a",
            "--min-count",
            "2",
            "--seed",
            "5",
        ]
    )
    assert rc == 0
    rows = _read_rows(out)
    assert list(rows[0]) == ["bin_c_lo", "bin_h_lo", "count", "ie_mean", "sift_mean", "sift_n"]
    assert all(int(r["count"]) >= 2 for r in rows)


def test_diversity_requires_group_for_multigroup(pipeline, tmp_path):
    rc = main(
        [
            "diversity",
            "--metrics",
            str(pipeline["metrics"]),
            "--embeddings",
            str(pipeline["emb"]),
            "--sift-cache",
            str(pipeline["cache"]),
            "--out",
            str(tmp_path / "x.csv"),
        ]
    )
    assert rc == 1


def test_yearly_outputs(pipeline, tmp_path):
    out_dir = tmp_path / "yearly"
    rc = main(
        [
            "yearly",
            "--metrics",
            str(pipeline["metrics"]),
            "--out-dir",
            str(out_dir),
            "--group",
            "gallery-a",
            "--embeddings",
            str(pipeline["emb"]),
            "--sift-cache",
            str(pipeline["cache"]),
            "--arma-p-ie",
            "1",
            "--arma-q-ie",
            "0",
            "--arma-p-sift",
            "1",
            "--arma-q-sift",
            "0",
            "--seed",
            "3",
        ]
    )
    assert rc == 0
    traj = _read_rows(out_dir / "trajectory.csv")
    assert list(traj[0]) == [
        "year",
        "mean_h",
        "mean_c",
        "var_h",
        "var_c",
        "skew_h",
        "skew_c",
        "ellipse_a",
        "ellipse_b",
        "ellipse_angle",
    ]
    years = [int(r["year"]) for r in traj]
    assert years == sorted(years)
    assert (out_dir / "summaries.csv").exists()
    assert (out_dir / "regression.csv").exists()


def test_classify_report(pipeline, tmp_path):
    out = tmp_path / "cls.csv"
    rc = main(
        [
            "classify",
            "--metrics",
            str(pipeline["metrics"]),
            "--out",
            str(out),
            "--group",
            "gallery-a",
            "--folds",
            "2",
            "--k",
            "3",
        ]
    )
    assert rc == 0
    rows = _read_rows(out)
    classifiers = {r["classifier"] for r in rows}
    assert classifiers == {"knn", "dummy_stratified", "dummy_uniform"}
    means = [r for r in rows if r["fold"] == "mean"]
    assert len(means) == 3


def test_sift_cache_resumes(pipeline, mini_corpus, capsys):
    # stage outputs are idempotent checkpoints: a rerun skips existing files
    before = {f.name: f.read_bytes() for f in pipeline["cache"].glob("*.sft")}
    rc = main(["sift-cache", "--manifest", str(mini_corpus), "--cache-dir", str(pipeline["cache"])])
    assert rc == 0
    after = {f.name: f.read_bytes() for f in pipeline["cache"].glob("*.sft")}
    assert after == before


def test_ch_logs_zero_ch_rows(tmp_path, capsys):
    import numpy as np
    from PIL import Image

    flat = tmp_path / "flat.png"
    Image.fromarray(np.full((32, 32, 3), 200, dtype=np.uint8)).save(flat)
    manifest = tmp_path / "m.csv"
    manifest.write_text(f"id,path,group,year,fields\nflat,{flat},g,2010,\n")
    out = tmp_path / "metrics.csv"
    assert main(["ch", "--manifest", str(manifest), "--out", str(out)]) == 0
    assert "zero_ch flat" in capsys.readouterr().err
    rows = _read_rows(out)
    assert len(rows) == 1  # flagged but present in the metrics CSV
    assert float(rows[0]["h"]) == 0.0 and float(rows[0]["c"]) == 0.0


def test_sample_size_command(capsys):
    assert main(["sample-size", "--population", "1000000000"]) == 0
    assert capsys.readouterr().out.strip() == "385"
    assert main(["sample-size", "--population", "50"]) == 0
    assert capsys.readouterr().out.strip() == "45"


def test_adf_command(tmp_path, capsys):
    path = tmp_path / "series.csv"
    rng = np.random.default_rng(0)
    values = rng.normal(size=300)
    path.write_text("v\n" + "\n".join(repr(float(v)) for v in values) + "\n")
    assert main(["adf", "--input", str(path), "--column", "v", "--lags", "2"]) == 0
    out = capsys.readouterr().out
    assert "statistic" in out and "5% cv" in out and "reject" in out


def test_arma_command(tmp_path):
    rng = np.random.default_rng(4)
    x = rng.normal(size=120)
    y = 2.0 + 1.5 * x + rng.normal(size=120)
    path = tmp_path / "data.csv"
    lines = ["y,x"] + [f"{repr(float(a))},{repr(float(b))}" for a, b in zip(y, x)]
    path.write_text("\n".join(lines) + "\n")
    out = tmp_path / "fit.csv"
    rc = main(
        ["arma", "--input", str(path), "--response", "y", "--regressors", "x", "--p", "0", "--q", "0", "--out", str(out)]
    )
    assert rc == 0
    rows = _read_rows(out)
    assert [r["term"] for r in rows] == ["x", "const"]
    assert float(rows[0]["estimate"]) == pytest.approx(1.5, abs=0.2)
    assert float(rows[1]["estimate"]) == pytest.approx(2.0, abs=0.3)


def test_pipeline_rerun_is_byte_identical(pipeline, tmp_path, mini_corpus):
    # identical seeds and inputs -> byte-identical stage outputs
    m2 = tmp_path / "metrics2.csv"
    assert main(["ch", "--manifest", str(mini_corpus), "--out", str(m2)]) == 0
    assert m2.read_bytes() == pipeline["metrics"].read_bytes()
    e2 = tmp_path / "emb2.chemb"
    assert (
        main(
            [
                "embed-ingest",
                "--features",
                str(pipeline["raw"]),
                "--out",
                str(e2),
                "--components",
                "8",
                "--manifest",
                str(mini_corpus),
            ]
        )
        == 0
    )
    assert e2.read_bytes() == pipeline["emb"].read_bytes()
