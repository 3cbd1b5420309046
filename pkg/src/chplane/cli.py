"""Command-line pipeline driver.

Subcommands cover the full corpus workflow; every stage writes a CSV or
binary artifact that later stages consume, so a run can resume from any
stage.  All randomness flows from explicit --seed flags; identical inputs
and flags produce byte-identical outputs regardless of --jobs.

    ch            manifest -> per-image C-H metrics CSV
    bounds        boundary curves of the C-H plane -> CSV
    sift-cache    manifest -> per-image descriptor cache files
    embed-ingest  raw-feature file -> PCA -> embeddings file
    diversity     metrics + embeddings + caches -> per-bin heatmap CSV
    yearly        metrics (+ similarity summaries) -> trajectory + regression CSVs
    classify      metrics -> kNN / dummy year-classification report
    sample-size   Cochran finite-population sample size
    adf           unit-root test on a CSV column
    arma          regression with ARMA errors on CSV columns

Exit codes: 0 clean, 1 fatal, 2 completed with per-image failures.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import atlas, econometrics, similarity
from . import features as feat
from . import sift as sift_mod
from .errors import ChplaneError
from .image_io import load_image, load_manifest, to_grayscale
from .ordinal import EmbeddingParams, ch_point, complexity_bounds
from .rng import derive_seed

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


def _fmt(value) -> str:
    """Deterministic CSV cell: shortest round-trip float repr, '' for missing."""
    if value is None:
        return ""
    if isinstance(value, float):
        if value != value:  # nan
            return ""
        return repr(float(value))
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def _write_csv(path: Path | str, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# ch
# --------------------------------------------------------------------------

def _resize_gray(gray: np.ndarray, long_side: int) -> np.ndarray:
    from scipy.ndimage import zoom

    h, w = gray.shape
    scale = long_side / max(h, w)
    if scale >= 1.0:
        return gray
    return zoom(gray, scale, order=1, grid_mode=True, mode="grid-mirror")


def _ch_one(args_tuple):
    rec, dx, dy, taux, tauy, resize = args_tuple
    try:
        gray = to_grayscale(load_image(rec.path))
        if resize:
            gray = _resize_gray(gray, resize)
        params = EmbeddingParams(dx=dx, dy=dy, taux=taux, tauy=tauy)
        point = ch_point(gray, params, rec)
        return rec.id, point, None
    except Exception as exc:
        return rec.id, None, f"{type(exc).__name__}: {exc}"


def cmd_ch(args) -> int:
    records = load_manifest(args.manifest)
    work = [(rec, args.dx, args.dy, args.taux, args.tauy, args.resize) for rec in records]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_ch_one, work, chunksize=8))
    else:
        results = [_ch_one(w) for w in work]
    rows = []
    failures = 0
    for rec, (rid, point, err) in zip(records, results):
        if err is not None:
            failures += 1
            _log(f"abnormal {rid}: {err}")
            continue
        if point.h == 0.0 and point.c == 0.0:
            _log(f"zero_ch {rid}")
        rows.append(
            [rid, rec.group, rec.year, point.h, point.c, point.width, point.height, point.window_count]
        )
    _write_csv(args.out, ["id", "group", "year", "h", "c", "width", "height", "window_count"], rows)
    _log(f"ch: {len(rows)} rows, {failures} abnormal -> {args.out}")
    return EXIT_PARTIAL if failures else EXIT_OK


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------

def cmd_bounds(args) -> int:
    curves = complexity_bounds(args.n, args.resolution)
    hs = np.linspace(0.0, 1.0, args.resolution)
    rows = [["lower", h, c] for h, c in zip(hs, curves.lower_at(hs))]
    rows += [["upper", h, c] for h, c in zip(hs, curves.upper_at(hs))]
    _write_csv(args.out, ["curve", "h", "c"], rows)
    return EXIT_OK


# --------------------------------------------------------------------------
# sift-cache
# --------------------------------------------------------------------------

def _sift_one(args_tuple):
    rec, cache_dir, resize = args_tuple
    out = Path(cache_dir) / f"{rec.id}.sft"
    if out.exists():
        return rec.id, "cached", None
    try:
        gray = to_grayscale(load_image(rec.path))
        if resize:
            gray = _resize_gray(gray, resize)
        ds = sift_mod.detect_and_describe(gray)
        sift_mod.save_descriptors(out, ds)
        return rec.id, f"{len(ds)} keypoints", None
    except Exception as exc:
        return rec.id, None, f"{type(exc).__name__}: {exc}"


def cmd_sift_cache(args) -> int:
    records = load_manifest(args.manifest)
    cache_dir = Path(args.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    if args.overwrite:
        for rec in records:
            target = cache_dir / f"{rec.id}.sft"
            if target.exists():
                target.unlink()
    work = [(rec, cache_dir, args.resize) for rec in records]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sift_one, work, chunksize=2))
    else:
        results = [_sift_one(w) for w in work]
    failures = sum(1 for _, _, err in results if err)
    for rid, _, err in results:
        if err:
            _log(f"abnormal {rid}: {err}")
    _log(f"sift-cache: {len(results) - failures} cached, {failures} failed -> {cache_dir}")
    return EXIT_PARTIAL if failures else EXIT_OK


# --------------------------------------------------------------------------
# embed-ingest
# --------------------------------------------------------------------------

def cmd_embed_ingest(args) -> int:
    raw = feat.read_chfeat(args.features)
    groups: dict[str, list[int]] = {}
    if args.manifest and not args.global_fit:
        by_id = {rec.id: rec.group for rec in load_manifest(args.manifest)}
        for i, rid in enumerate(raw.ids):
            groups.setdefault(by_id.get(rid, ""), []).append(i)
    else:
        groups[""] = list(range(len(raw.ids)))

    low = raw.low.astype(np.float64)
    high = raw.high.astype(np.float64)
    if args.zscore:
        for block in (low, high):
            sd = block.std(axis=0)
            sd[sd == 0.0] = 1.0
            block -= block.mean(axis=0)
            block /= sd

    vectors = np.zeros((len(raw.ids), 2 * args.components), dtype=np.float32)
    for group in sorted(groups):
        idx = groups[group]
        model_low = similarity.fit_pca(low[idx], args.components)
        model_high = similarity.fit_pca(high[idx], args.components)
        emb = similarity.build_embeddings(
            feat.RawFeatures(
                ids=[raw.ids[i] for i in idx], low=low[idx], high=high[idx]
            ),
            model_low,
            model_high,
        )
        vectors[idx] = emb.vectors
    feat.write_chemb(args.out, feat.EmbeddingTable(ids=list(raw.ids), vectors=vectors))
    _log(f"embed-ingest: {len(raw.ids)} embeddings of dim {vectors.shape[1]} -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# metrics CSV helpers
# --------------------------------------------------------------------------

def _read_metrics(path, group: str | None, include_zero_ch: bool):
    ids, groups, years, hs, cs = [], [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            h = float(row["h"])
            c = float(row["c"])
            if not include_zero_ch and h == 0.0 and c == 0.0:
                continue
            if group is not None and row["group"] != group:
                continue
            ids.append(row["id"])
            groups.append(row["group"])
            years.append(int(row["year"]))
            hs.append(h)
            cs.append(c)
    return ids, groups, np.array(years), np.array(hs), np.array(cs)


def _require_single_group(groups: list[str], selected: str | None) -> None:
    distinct = sorted(set(groups))
    if selected is None and len(distinct) > 1:
        raise ChplaneError(
            f"metrics contain groups {distinct}; select one with --group"
        )


def _parse_grid(text: str | None, min_count: int) -> atlas.GridSpec:
    if not text:
        return atlas.GridSpec(min_count=min_count)
    try:
        c_part, h_part = text.split(",")
        c0, c1, cs = (float(v) for v in c_part.split(":"))
        h0, h1, hs = (float(v) for v in h_part.split(":"))
    except ValueError:
        raise ChplaneError(f"bad --grid {text!r}; expected C0:C1:STEP,H0:H1:STEP") from None
    return atlas.GridSpec(
        c_range=(c0, c1), h_range=(h0, h1), c_step=cs, h_step=hs, min_count=min_count
    )


# --------------------------------------------------------------------------
# diversity
# --------------------------------------------------------------------------

def cmd_diversity(args) -> int:
    ids, groups, _, hs, cs = _read_metrics(args.metrics, args.group, args.include_zero_ch)
    _require_single_group(groups, args.group)
    grid = atlas.bin_points(ids, hs, cs, _parse_grid(args.grid, args.min_count))

    emb = feat.read_chemb(args.embeddings)
    embeddings = {rid: vec for rid, vec in zip(emb.ids, emb.vectors.astype(np.float64))}

    cache_dir = Path(args.sift_cache)

    class _LazyDescriptors(dict):
        def __missing__(self, rid):
            ds = sift_mod.load_descriptors(cache_dir / f"{rid}.sft")
            self[rid] = ds
            return ds

    rows = []
    for div in atlas.bin_diversity(
        grid,
        embeddings,
        _LazyDescriptors(),
        seed=args.seed,
        ratio=args.ratio,
        union=args.jaccard_union,
        log=_log,
    ):
        rows.append([div.c_lo, div.h_lo, div.count, div.ie_mean, div.sift_mean, div.sift_n])
    _write_csv(args.out, ["bin_c_lo", "bin_h_lo", "count", "ie_mean", "sift_mean", "sift_n"], rows)
    _log(f"diversity: {len(rows)} reportable bins -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# yearly
# --------------------------------------------------------------------------

def _compute_summaries(args, ids, years):
    """Per-year mean similarity summaries from embeddings and/or SIFT caches."""
    rows = []
    by_year: dict[int, list[int]] = {}
    for i, y in enumerate(years):
        by_year.setdefault(int(y), []).append(i)
    emb_table = None
    if args.embeddings:
        emb = feat.read_chemb(args.embeddings)
        lookup = {rid: vec for rid, vec in zip(emb.ids, emb.vectors.astype(np.float64))}
        emb_table = [lookup.get(rid) for rid in ids]
    for year in sorted(by_year):
        idx = by_year[year]
        if emb_table is not None:
            vecs = [emb_table[i] for i in idx if emb_table[i] is not None]
            if len(vecs) >= 2:
                n = min(args.ie_sample, len(vecs))
                summ = similarity.mean_pairwise_similarity(
                    np.asarray(vecs),
                    "ie",
                    group=str(year),
                    subsample_n=n,
                    seed=derive_seed(args.seed, "ie", year),
                )
                rows.append([year, "ie", summ.mean, summ.pair_count, summ.seed])
        if args.sift_cache:
            cache_dir = Path(args.sift_cache)
            member_ids = [ids[i] for i in idx]
            n = min(args.sift_sample, len(member_ids))
            seed = derive_seed(args.seed, "sift", year)
            chosen = similarity.subsample(member_ids, n, seed)
            sets = []
            for rid in chosen:
                path = cache_dir / f"{rid}.sft"
                if path.exists():
                    sets.append(sift_mod.load_descriptors(path))
            if len(sets) >= 2:
                summ = similarity.mean_pairwise_similarity(
                    sets,
                    "sift",
                    group=str(year),
                    seed=seed,
                    ratio=args.ratio,
                    union=args.jaccard_union,
                )
                rows.append([year, "sift", summ.mean, summ.pair_count, seed])
    return rows


def _read_summaries(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                [int(row["group"]), row["measure"], float(row["mean"]), int(row["pair_count"]), int(row["seed"])]
            )
    return rows


def cmd_yearly(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ids, groups, years, hs, cs = _read_metrics(args.metrics, args.group, args.include_zero_ch)
    _require_single_group(groups, args.group)
    if len(ids) == 0:
        raise ChplaneError("no usable metric rows")

    stats = atlas.yearly_stats(years, hs, cs, group=args.group or groups[0])
    try:
        atlas.trajectory(stats)
    except ChplaneError as exc:
        raise ChplaneError(f"trajectory: {exc}") from exc

    traj_rows = []
    for st in stats:
        sel = years == st.year
        ell_a = ell_b = ell_angle = None
        if sel.sum() >= 3:
            try:
                ell = atlas.confidence_ellipse(
                    np.column_stack([hs[sel], cs[sel]]), level=0.95, of_mean=args.ellipse_of_mean
                )
                ell_a, ell_b = ell.semi_axes
                ell_angle = ell.angle
            except ChplaneError:
                pass
        traj_rows.append(
            [st.year, st.mean_h, st.mean_c, st.var_h, st.var_c, st.skew_h, st.skew_c, ell_a, ell_b, ell_angle]
        )
    traj_path = out_dir / "trajectory.csv"
    _write_csv(
        traj_path,
        ["year", "mean_h", "mean_c", "var_h", "var_c", "skew_h", "skew_c", "ellipse_a", "ellipse_b", "ellipse_angle"],
        traj_rows,
    )
    _log(f"yearly: {len(traj_rows)} years -> {traj_path}")

    if args.summaries:
        summaries = _read_summaries(args.summaries)
    elif args.embeddings or args.sift_cache:
        summaries = _compute_summaries(args, ids, years)
        _write_csv(
            out_dir / "summaries.csv",
            ["group", "measure", "mean", "pair_count", "seed"],
            summaries,
        )
    else:
        summaries = []
    if not summaries:
        _log("yearly: no similarity summaries; regression skipped")
        return EXIT_OK

    stat_by_year = {st.year: st for st in stats}
    fit_rows = []
    for measure in ("ie", "sift"):
        series = sorted((r[0], r[2]) for r in summaries if r[1] == measure)
        if not series:
            continue
        sim_years = [y for y, _ in series]
        if any(y not in stat_by_year for y in sim_years):
            _log(f"yearly: {measure} years missing from metrics; skipped")
            continue
        y_vec = np.array([v for _, v in series])
        X = np.array(
            [
                [stat_by_year[y].mean_h, stat_by_year[y].var_h, stat_by_year[y].mean_c, stat_by_year[y].var_c, 1.0]
                for y in sim_years
            ]
        )
        if args.difference:
            y_vec = np.diff(y_vec)
            X = X[1:]
        p = args.arma_p_ie if measure == "ie" else args.arma_p_sift
        q = args.arma_q_ie if measure == "ie" else args.arma_q_sift
        try:
            fit = econometrics.fit_arma_regression(
                econometrics.RegressionSpec(y=y_vec, X=X, p=p, q=q),
                method="css" if args.css else "exact",
            )
        except ChplaneError as exc:
            _log(f"yearly: {measure} regression failed: {exc}")
            continue
        for warning in fit.warnings:
            _log(f"yearly: {measure} regression warning: {warning}")
        terms = ["mean_h", "var_h", "mean_c", "var_c", "const"]
        for term, est, se, t in zip(terms, fit.beta, fit.se, fit.tvalues):
            fit_rows.append([measure, term, est, se, t, fit.loglik, p, q, fit.converged])
    reg_path = out_dir / "regression.csv"
    _write_csv(
        reg_path,
        ["model", "term", "estimate", "se", "t", "loglik", "p", "q", "converged"],
        fit_rows,
    )
    _log(f"yearly: regression report -> {reg_path}")
    return EXIT_OK


# --------------------------------------------------------------------------
# classify
# --------------------------------------------------------------------------

def cmd_classify(args) -> int:
    _, groups, years, hs, cs = _read_metrics(args.metrics, args.group, args.include_zero_ch)
    _require_single_group(groups, args.group)
    features = np.column_stack([hs, cs])
    rows = []
    knn_acc, knn_mean = atlas.knn_classify_cv(
        features, years, k=args.k, folds=args.folds, seed=args.seed
    )
    for i, acc in enumerate(knn_acc):
        rows.append(["knn", i, acc])
    rows.append(["knn", "mean", knn_mean])
    for strategy in ("stratified", "uniform"):
        accs, mean = atlas.dummy_classify_cv(
            years, strategy=strategy, folds=args.folds, seed=args.seed
        )
        for i, acc in enumerate(accs):
            rows.append([f"dummy_{strategy}", i, acc])
        rows.append([f"dummy_{strategy}", "mean", mean])
    _write_csv(args.out, ["classifier", "fold", "accuracy"], rows)
    _log(f"classify: knn mean accuracy {knn_mean:.4f} -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# small statistical commands
# --------------------------------------------------------------------------

def cmd_sample_size(args) -> int:
    n = similarity.required_sample_size(args.population, args.confidence, args.margin)
    print(n)
    return EXIT_OK


def _read_column(path, column):
    values = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            values.append(float(row[column]))
    return np.array(values)


def cmd_adf(args) -> int:
    series = _read_column(args.input, args.column)
    if args.difference:
        series = np.diff(series)
    result = econometrics.adf_test(series, lags=args.lags, trend=args.trend, gls=args.gls)
    print(f"statistic {result.statistic!r}")
    print(f"lags {result.lags}")
    print(f"trend {result.trend}")
    print(f"nobs {result.nobs}")
    for level in sorted(result.critical_values):
        cv = result.critical_values[level]
        verdict = "reject" if result.reject[level] else "fail-to-reject"
        print(f"{int(level * 100)}% cv {cv!r} -> {verdict}")
    return EXIT_OK


def cmd_arma(args) -> int:
    y = _read_column(args.input, args.response)
    columns = [c for c in args.regressors.split(",") if c]
    X_cols = [_read_column(args.input, c) for c in columns]
    X_cols.append(np.ones(len(y)))
    X = np.column_stack(X_cols)
    if args.difference:
        y = np.diff(y)
        X = X[1:]
    fit = econometrics.fit_arma_regression(
        econometrics.RegressionSpec(y=y, X=X, p=args.p, q=args.q),
        method="css" if args.css else "exact",
    )
    for warning in fit.warnings:
        _log(f"arma: {warning}")
    terms = columns + ["const"]
    rows = [
        ["arma", term, est, se, t, fit.loglik, args.p, args.q, fit.converged]
        for term, est, se, t in zip(terms, fit.beta, fit.se, fit.tvalues)
    ]
    _write_csv(args.out, ["model", "term", "estimate", "se", "t", "loglik", "p", "q", "converged"], rows)
    _log(f"arma: loglik {fit.loglik!r}, converged {fit.converged} -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_common_seed(p):
    p.add_argument("--seed", type=int, default=0, help="explicit RNG seed (no wall-clock seeding)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chplane", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ch", help="compute per-image C-H metrics")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dx", type=int, default=2)
    p.add_argument("--dy", type=int, default=2)
    p.add_argument("--taux", type=int, default=1)
    p.add_argument("--tauy", type=int, default=1)
    p.add_argument("--resize", type=int, default=0, help="shrink long side to N pixels first (0 = native)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ch)

    p = sub.add_parser("bounds", help="write C-H boundary curves")
    p.add_argument("--n", type=int, default=24)
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sift-cache", help="cache keypoint descriptors per image")
    p.add_argument("--manifest", required=True)
    p.add_argument("--cache-dir", required=True)
    p.add_argument("--resize", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_sift_cache)

    p = sub.add_parser("embed-ingest", help="reduce raw features to embeddings")
    p.add_argument("--features", required=True, help=".chfeat raw-feature file")
    p.add_argument("--out", required=True, help=".chemb output")
    p.add_argument("--components", type=int, default=100)
    p.add_argument("--manifest", default=None, help="group rows for per-group PCA fits")
    p.add_argument("--global-fit", action="store_true", help="one PCA fit across all groups")
    p.add_argument("--zscore", action="store_true", help="standardize features before PCA")
    p.set_defaults(func=cmd_embed_ingest)

    p = sub.add_parser("diversity", help="per-bin density and similarity heatmap")
    p.add_argument("--metrics", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--sift-cache", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--group", default=None)
    p.add_argument("--grid", default=None, help="C0:C1:STEP,H0:H1:STEP")
    p.add_argument("--min-count", type=int, default=50)
    p.add_argument("--ratio", type=float, default=sift_mod.DEFAULT_RATIO)
    p.add_argument("--jaccard-union", choices=["exclusive", "additive"], default="exclusive")
    p.add_argument("--include-zero-ch", action="store_true")
    _add_common_seed(p)
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser("yearly", help="yearly trajectory, ellipses, and regression")
    p.add_argument("--metrics", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--group", default=None)
    p.add_argument("--summaries", default=None, help="precomputed similarity summaries CSV")
    p.add_argument("--embeddings", default=None)
    p.add_argument("--sift-cache", default=None)
    p.add_argument("--ie-sample", type=int, default=1000)
    p.add_argument("--sift-sample", type=int, default=100)
    p.add_argument("--arma-p-ie", type=int, default=3)
    p.add_argument("--arma-q-ie", type=int, default=1)
    p.add_argument("--arma-p-sift", type=int, default=1)
    p.add_argument("--arma-q-sift", type=int, default=1)
    p.add_argument("--difference", action="store_true", help="regress year-over-year change in similarity")
    p.add_argument("--css", action="store_true", help="conditional-sum-of-squares objective instead of exact likelihood")
    p.add_argument("--ellipse-of-mean", action="store_true")
    p.add_argument("--ratio", type=float, default=sift_mod.DEFAULT_RATIO)
    p.add_argument("--jaccard-union", choices=["exclusive", "additive"], default="exclusive")
    p.add_argument("--include-zero-ch", action="store_true")
    _add_common_seed(p)
    p.set_defaults(func=cmd_yearly)

    p = sub.add_parser("classify", help="year classification: kNN vs dummy baselines")
    p.add_argument("--metrics", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--group", default=None)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--include-zero-ch", action="store_true")
    _add_common_seed(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sample-size", help="Cochran finite-population sample size")
    p.add_argument("--population", type=int, required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--margin", type=float, default=0.05)
    p.set_defaults(func=cmd_sample_size)

    p = sub.add_parser("adf", help="augmented Dickey-Fuller unit-root test")
    p.add_argument("--input", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--lags", type=int, default=0)
    p.add_argument("--trend", choices=["none", "constant", "trend"], default="constant")
    p.add_argument("--gls", action="store_true", help="GLS-detrended variant")
    p.add_argument("--difference", action="store_true")
    p.set_defaults(func=cmd_adf)

    p = sub.add_parser("arma", help="regression with ARMA errors")
    p.add_argument("--input", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--regressors", required=True, help="comma-separated column names")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--difference", action="store_true")
    p.add_argument("--css", action="store_true", help="conditional-sum-of-squares objective instead of exact likelihood")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_arma)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ChplaneError as exc:
        _log(f"error: {exc}")
        return EXIT_FATAL
    except OSError as exc:
        _log(f"io error: {exc}")
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
