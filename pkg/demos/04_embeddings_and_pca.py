"""Embedding similarity: raw feature rows -> PCA -> cosine diversity.

The neural extractor ships raw per-image feature rows in a binary exchange
file (.chfeat): a 3136-value low-level map and a 512-value high-level
vector per image.  This side owns all the statistics: PCA to 100
dimensions per level, concatenation to a 200-d embedding, and mean
pairwise cosine similarity as the (inverse) diversity measure.

The rows here come from the deterministic stub generator so the demo runs
without network weights; swap in a real .chfeat from the extractor for
actual corpora.
"""

from pathlib import Path

import numpy as np

from chplane import (
    build_embeddings,
    fit_pca,
    load_manifest,
    mean_pairwise_similarity,
    read_chfeat,
    required_sample_size,
    subsample,
)
from chplane.synthetic import make_mini_corpus, write_stub_features

out = Path(__file__).parent / "demo_output"
corpus_dir = out / "corpus"
if not (corpus_dir / "manifest.csv").exists():
    make_mini_corpus(corpus_dir, n_images=200, seed=20_100_101)
records = load_manifest(corpus_dir / "manifest.csv")

feat_path = out / "corpus.chfeat"
if not feat_path.exists():
    print("writing stub feature rows ...")
    write_stub_features(records, feat_path)
raw = read_chfeat(feat_path)
print(f"raw features: {len(raw.ids)} rows, low {raw.low.shape[1]}-d, high {raw.high.shape[1]}-d")

# --- PCA per level, then concatenate ------------------------------------------
k = 40  # 100 in production; the stub corpus is small
model_low = fit_pca(raw.low, k)
model_high = fit_pca(raw.high, k)
explained_low = model_low.explained_variance.sum() / np.var(raw.low, ddof=1, axis=0).sum()
print(f"low-level PCA: top {k} components explain {100 * explained_low:.1f}% of variance")

table = build_embeddings(raw, model_low, model_high)
print(f"embeddings: {table.vectors.shape[0]} x {table.vectors.shape[1]}")

# --- diversity of a year group --------------------------------------------------
year_ids = [i for i, rec in enumerate(records) if rec.year == 2015]
summary = mean_pairwise_similarity(
    table.vectors[year_ids].astype(float), "ie", group="2015", ids=[records[i].id for i in year_ids]
)
print(f"\nyear 2015: mean pairwise cosine {summary.mean:.4f} over {summary.pair_count} pairs")
print("lower mean similarity = higher intragroup diversity")

# --- Cochran subsampling ----------------------------------------------------------
# Expensive pairwise measures run on a seeded subsample sized by Cochran's
# formula with finite-population correction (95% confidence, 5% margin).
for population in (50, 200, 1000, 10**6):
    print(f"population {population:>8}: sample {required_sample_size(population)}")
picked = subsample(list(range(len(year_ids))), min(10, len(year_ids)), seed=2015)
print(f"seeded subsample of year 2015 indices: {picked}")
