#!/usr/bin/env python3
"""Materialize a small labeled synthetic corpus plus its bench manifest.

Five blob datasets with cluster counts 2 through 6, each with 10% uniform
background noise, written as plain CSV (features first, label last) next to
an INI manifest that `affclust bench --manifest ...` consumes directly.
Everything is seeded, so rerunning rewrites identical bytes.
"""

import argparse
from pathlib import Path

from affclust.data import SyntheticSpec, generate_synthetic, save_dataset

DIMENSION = 8
SEPARATION = 24.0


def recipes():
    # one dataset per cluster count; seeds chosen so k varies with seed
    return [
        SyntheticSpec(
            cluster_count=k,
            points_per_cluster=70,
            dimension=DIMENSION,
            center_separation=SEPARATION,
            spread=1.0,
            noise_fraction=0.1,
            noise_margin=0.75,
            center_scheme="axes",
            seed=k - 2,
            name=f"blobs-k{k}",
        )
        for k in range(2, 7)
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path("data/synthetic"),
        help="directory for the CSV files and the manifest (default: data/synthetic)",
    )
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    sections = []
    for spec in recipes():
        dataset = generate_synthetic(spec)
        path = args.out_dir / f"{dataset.name}.csv"
        save_dataset(dataset, path)
        sections.append(
            f"[{dataset.name}]\n"
            f"path = {path.name}\n"
            f"truth_k = {spec.cluster_count}\n"
            f"label_col = {DIMENSION + 1}\n"
        )
        print(f"wrote {path} ({dataset.n_points} points, k={spec.cluster_count})")

    manifest = args.out_dir / "synthetic_corpus.ini"
    manifest.write_text("\n".join(sections), encoding="utf-8")
    print(f"wrote {manifest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
