"""chextract command line.

    chextract run          manifest + weights -> .chfeat feature file
    chextract make-weights seeded random state dict (for environments
                           without the published ImageNet checkpoint)

Exit codes for `run`: 0 on success (isolated skips allowed), 2 when more
than 1% of manifest images failed, 1 on fatal errors.
"""

from __future__ import annotations

import argparse
import sys

from .extract import extract_features
from .manifest import ManifestError
from .model import save_random_weights


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chextract", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="extract feature rows for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--weights", required=True, help="state-dict file for the backbone")
    p.add_argument("--out", required=True, help=".chfeat output path")
    p.add_argument("--reduce", choices=["mean", "max"], default="mean",
                   help="channel reduction for the low-level map")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("make-weights", help="write a seeded random state dict")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_make_weights)
    return parser


def _cmd_run(args) -> int:
    report = extract_features(args.manifest, args.weights, args.out, reduce=args.reduce)
    print(
        f"wrote {report.written} rows, {len(report.failed)} failed -> {args.out}",
        file=sys.stderr,
    )
    return 2 if report.failure_rate > 0.01 else 0


def _cmd_make_weights(args) -> int:
    save_random_weights(args.out, seed=args.seed)
    print(f"wrote random weights (seed {args.seed}) -> {args.out}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ManifestError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
