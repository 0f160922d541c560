#!/usr/bin/env python3
"""Full secondary study driver: materialize datasets with the generator
CLI, then run the trainer protocols and collect the result tables.

This is the long-running counterpart to the slow-marked trainer tests;
at the default 2000 frames it takes from tens of minutes (GPU) to a few
hours (CPU). Use --frames/--epochs to scale it down for a smoke run.

Usage:
  python3 scripts/run_experiments.py --out study_out [--frames 2000]
          [--epochs 25] [--seeds 0 1 2 3 4]
          [--protocols led_vs_hb cross_domain data_fraction]
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

from ledtrainer.config import TrainConfig
from ledtrainer.experiments import PROTOCOLS, run_experiment


def sh(*cmd):
    proc = subprocess.run([str(c) for c in cmd], capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"command failed ({proc.returncode}): {cmd}\n{proc.stderr}")
    return proc.stdout


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--frames", type=int, default=2000)
    ap.add_argument("--size", type=int, default=96)
    ap.add_argument("--epochs", type=int, default=25)
    ap.add_argument("--batch-size", type=int, default=32)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    ap.add_argument("--protocols", nargs="+", default=["led_vs_hb"],
                    choices=list(PROTOCOLS))
    ap.add_argument("--cells", type=float, nargs="+", default=[0.5, 0.25],
                    help="cell sizes for the cell_size protocol")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    gen = [sys.executable, "-m", "ledgen.cli", "generate"]

    data = out / "data"
    kinds = "led,hb,hl,vl" if "pattern_study" in args.protocols else "led,hb"
    if not (data / "manifest.json").exists():
        print(f"materializing {args.frames} frames ...")
        sh(*gen, "--out", data, "--count", args.frames, "--seed", 0,
           "--size", args.size, "--kinds", kinds)
    manifest = data / "manifest.json"

    cell_manifests = {}
    if "cell_size" in args.protocols:
        for cell in args.cells:
            d = out / f"data_cell{cell:g}"
            if not (d / "manifest.json").exists():
                print(f"materializing cell={cell:g} dataset ...")
                sh(*gen, "--out", d, "--count", args.frames, "--seed", 0,
                   "--size", args.size, "--kinds", "led", "--cell", cell)
            cell_manifests[f"{cell:g}"] = str(d / "manifest.json")

    summary = {}
    for protocol in args.protocols:
        per_seed = []
        for seed in args.seeds:
            cfg = TrainConfig(input_size=args.size, epochs=args.epochs,
                              batch_size=args.batch_size, seed=seed)
            arg = cell_manifests if protocol == "cell_size" else manifest
            run_dir = out / protocol / f"seed{seed}"
            print(f"{protocol} seed={seed} ...")
            table = run_experiment(protocol, arg, cfg, run_dir)
            per_seed.append({"seed": seed, "rows": table["rows"]})
        summary[protocol] = per_seed
        with open(out / f"{protocol}_summary.json", "w") as f:
            json.dump(per_seed, f, indent=1)

    with open(out / "summary.json", "w") as f:
        json.dump(summary, f, indent=1)
    print(f"wrote {out}/summary.json")


if __name__ == "__main__":
    main()
