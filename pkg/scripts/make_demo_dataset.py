"""Build a small synthetic dataset for demos and end-to-end runs.

Writes a 200-item manifold dataset (with ground truth in the manifest so
`rankprop simulate` works on it) and runs prep so the service starts
without a cold cache. Usage:

    python3 scripts/make_demo_dataset.py [outdir]

Defaults to ./demo-dataset.
"""
import sys
from pathlib import Path

from rankprop import make_manifold, save_dataset
from rankprop.cli import main as cli_main


def build(outdir, u=200, d=16, seed=20, noise=0.05):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    X, gt, _ = make_manifold(u, d=d, seed=seed, noise=noise)
    ids = [f"obj-{i:03d}" for i in range(u)]
    manifest = outdir / "demo.json"
    save_dataset(manifest, X, item_ids=ids, ground_truth=gt)
    rc = cli_main(["prep", "--dataset", str(manifest),
                   "--k", "10", "--m", "5", "--r", "40"])
    if rc != 0:
        raise SystemExit(rc)
    print(f"dataset ready: {manifest}")
    return manifest


if __name__ == "__main__":
    build(sys.argv[1] if len(sys.argv) > 1 else "demo-dataset")
