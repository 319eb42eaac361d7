"""Run every config in configs/ and print a one-line summary per run.

    python3 scripts/run_all_configs.py [--only dicke] [--out out]
"""

import argparse
import csv
import json
import time
from pathlib import Path

import numpy as np

from eigencorr.config import parse_config
from eigencorr.pipeline import run_pipeline

ROOT = Path(__file__).resolve().parents[1]


def _slope_ratio(path: Path, eps_lo: float, eps_hi: float):
    with open(path) as fh:
        rows = [r for r in csv.DictReader(fh) if r["value"] and r["prediction"]]
    eps = np.array([float(r["eps_center"]) for r in rows])
    val = np.array([float(r["value"]) for r in rows])
    pred = np.array([float(r["prediction"]) for r in rows])
    keep = (eps >= eps_lo) & (eps <= eps_hi)
    if keep.sum() < 2:
        return float("nan")
    return np.polyfit(eps[keep], val[keep], 1)[0] / np.polyfit(eps[keep], pred[keep], 1)[0]


def _central_range(efshape: Path, fraction=1e-2):
    with open(efshape) as fh:
        rows = [r for r in csv.DictReader(fh) if r["value"]]
    eps = np.array([float(r["eps_center"]) for r in rows])
    pi = np.array([float(r["value"]) for r in rows])
    sel = eps[pi >= fraction * pi.max()]
    return sel.min(), sel.max()


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--only", default=None, help="substring filter on config names")
    ap.add_argument("--out", default=str(ROOT / "out"))
    args = ap.parse_args()

    for path in sorted((ROOT / "configs").glob("*.json")):
        if args.only and args.only not in path.stem:
            continue
        cfg = parse_config(path.read_text())
        out = Path(args.out) / path.stem
        t0 = time.perf_counter()
        manifest = run_pipeline(cfg, out)
        dt = time.perf_counter() - t0
        line = f"{path.stem:22s} dim={manifest['dim']:5d} d={manifest['d']:.4g} {dt:6.1f}s"
        if (out / "efshape.csv").exists():
            lo, hi = _central_range(out / "efshape.csv")
            if (out / "corr1.csv").exists():
                line += f"  C1 slope/pred={_slope_ratio(out / 'corr1.csv', lo, hi):.3f}"
            if (out / "corr1_weighted.csv").exists():
                line += f"  weighted slope/pred={_slope_ratio(out / 'corr1_weighted.csv', lo, hi):.3f}"
        if "dynamics" in manifest:
            line += f"  F_i relL2={manifest['dynamics']['relative_l2_error']:.3f}"
        if "spacings" in manifest:
            line += f"  <r>={manifest['spacings']['mean_ratio']:.4f}"
        print(line)
    print(json.dumps({"out": args.out}))


if __name__ == "__main__":
    main()
