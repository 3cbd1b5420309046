"""The whole pipeline through the CLI, stage by stage.

Each subcommand writes an idempotent artifact, so a long corpus run can
resume from any stage.  All randomness comes from explicit seeds: rerunning
with the same flags reproduces every file byte for byte.
"""

import shutil
from pathlib import Path

from chplane.cli import main
from chplane.image_io import load_manifest
from chplane.synthetic import make_mini_corpus, write_stub_features

out = Path(__file__).parent / "demo_output" / "pipeline"
if out.exists():
    shutil.rmtree(out)
out.mkdir(parents=True)

corpus = Path(__file__).parent / "demo_output" / "corpus"
if not (corpus / "manifest.csv").exists():
    make_mini_corpus(corpus, n_images=200, seed=20_100_101)
manifest = corpus / "manifest.csv"

print("== stage 1: per-image C-H metrics ==")
main(["ch", "--manifest", str(manifest), "--out", str(out / "metrics.csv"), "--jobs", "2"])

print("\n== stage 2: boundary curves for plotting ==")
main(["bounds", "--n", "24", "--resolution", "200", "--out", str(out / "bounds.csv")])

print("\n== stage 3: descriptor cache (resumable: rerun skips existing) ==")
main(["sift-cache", "--manifest", str(manifest), "--cache-dir", str(out / "cache"), "--jobs", "2"])

print("\n== stage 4: raw features -> embeddings ==")
# the extractor would produce corpus.chfeat; the stub generator stands in
write_stub_features(load_manifest(manifest), out / "corpus.chfeat")
main(
    [
        "embed-ingest",
        "--features", str(out / "corpus.chfeat"),
        "--out", str(out / "corpus.chemb"),
        "--components", "20",
        "--manifest", str(manifest),
    ]
)

print("\n== stage 5: per-bin diversity heatmap (one group at a time) ==")
main(
    [
        "diversity",
        "--metrics", str(out / "metrics.csv"),
        "--embeddings", str(out / "corpus.chemb"),
        "--sift-cache", str(out / "cache"),
        "--out", str(out / "heatmap_gallery-a.csv"),
        "--group", "gallery-a",
        "--min-count", "3",
        "--seed", "11",
    ]
)

print("\n== stage 6: yearly trajectory, summaries, ARMA regression ==")
main(
    [
        "yearly",
        "--metrics", str(out / "metrics.csv"),
        "--out-dir", str(out / "yearly_gallery-a"),
        "--group", "gallery-a",
        "--embeddings", str(out / "corpus.chemb"),
        "--sift-cache", str(out / "cache"),
        "--seed", "11",
    ]
)

print("\n== stage 7: year-classification baselines ==")
main(
    [
        "classify",
        "--metrics", str(out / "metrics.csv"),
        "--out", str(out / "classify_gallery-a.csv"),
        "--group", "gallery-a",
        "--folds", "3",
        "--seed", "11",
    ]
)

print("\n== artifacts ==")
for path in sorted(out.rglob("*")):
    if path.is_file() and path.parent.name != "cache":
        print(f"  {path.relative_to(out)}  ({path.stat().st_size} bytes)")
caches = list((out / "cache").glob("*.sft"))
print(f"  cache/*.sft  ({len(caches)} descriptor caches)")
