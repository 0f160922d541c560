"""Command-line surface: generate / project / eval / gradcheck / subset / pattern.

Exit codes: 0 success, 2 contract error, 3 I/O error, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dataset import (
    DatasetManifest,
    PreprocessSpec,
    default_rig,
    materialize_dataset,
    subset_manifest,
    verify_manifest,
)
from .errors import ContractError, FormatError, LedgenError
from .geometry import ProjectorModel
from .io import read_depth
from .losses import ABLATION_CONFIGS, gradcheck
from .metrics import binned_metrics, metrics_from_pixels, pooled_metrics, roi_mask
from .patterns import apply_photometry, control_to_png, make_pattern, photometry_to_png
from .render import image_to_png, shade_depth_map
from .scene import DepthMap, SceneConfig

EXIT_OK = 0
EXIT_CONTRACT = 2
EXIT_IO = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    p = _Parser(prog="ledgen", description="Structured-light headlight dataset toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="materialize a dataset")
    g.add_argument("--out", required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kinds", default="led,hb")
    g.add_argument("--cell", type=float, default=0.5)
    g.add_argument("--size", type=int, default=320)
    g.add_argument("--scene-config", help="JSON file with SceneConfig overrides")
    g.add_argument("--json", action="store_true")

    pr = sub.add_parser("project", help="shade a depth map (or walls) under a pattern")
    pr.add_argument("--depth", help="input depth map (.pfm or 16-bit .png)")
    pr.add_argument("--wall", type=float, action="append", default=[],
                    help="fronto-parallel wall distance in meters (repeatable)")
    pr.add_argument("--cell", type=float, default=0.5)
    pr.add_argument("--kind", default="led", choices=["led", "hb", "hl", "vl"])
    pr.add_argument("--size", type=int, default=320)
    pr.add_argument("--out", required=True, help="output PNG path or prefix")

    ev = sub.add_parser("eval", help="metrics for a prediction directory vs a manifest")
    ev.add_argument("--manifest", required=True)
    ev.add_argument("--pred", help="directory of {id:06d}.pfm predictions")
    ev.add_argument("--split", default="test")
    ev.add_argument("--mask", default="full", choices=["roi", "outside", "full"])
    ev.add_argument("--bins", action="store_true")
    ev.add_argument("--mode", default="pool", choices=["pool", "frame_mean"])
    ev.add_argument("--verify", action="store_true", help="only check manifest integrity")
    ev.add_argument("--json", action="store_true")

    gc = sub.add_parser("gradcheck", help="finite-difference check of the loss gradients")
    gc.add_argument("--seed", type=int, default=0)
    gc.add_argument("--h", type=float, default=1e-4)
    gc.add_argument("--size", type=int, default=16)
    gc.add_argument("--instances", type=int, default=10)
    gc.add_argument("--json", action="store_true")

    su = sub.add_parser("subset", help="subsample or re-mix a manifest")
    su.add_argument("--manifest", required=True)
    su.add_argument("--out", required=True)
    su.add_argument("--fraction", type=float)
    su.add_argument("--ratio", help="e.g. led=0.1,hb=0.9")
    su.add_argument("--seed", type=int, default=0)
    su.add_argument("--json", action="store_true")

    pa = sub.add_parser("pattern", help="export control matrix and photometry PNGs")
    pa.add_argument("--kind", default="led", choices=["led", "hb", "hl", "vl"])
    pa.add_argument("--cell", type=float, default=0.5)
    pa.add_argument("--out", required=True, help="output prefix")
    return p


_KIND_TO_PATTERN = {"led": "checkerboard", "hb": "high_beam", "hl": "hlines", "vl": "vlines"}


def _cmd_generate(args):
    config = None
    if args.scene_config:
        config = SceneConfig.from_json(Path(args.scene_config).read_text())
    kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip())
    manifest = materialize_dataset(args.out, args.count, args.seed, kinds,
                                   config, args.cell, args.size)
    if args.json:
        print(json.dumps({"out": str(args.out), "counts": manifest.counts,
                          "entries": len(manifest.entries)}, sort_keys=True))
    else:
        print(f"wrote {len(manifest.entries)} entries to {args.out} ({manifest.counts})")
    return EXIT_OK


def _cmd_project(args):
    cam, _, proj = default_rig(args.size)
    ph = apply_photometry(make_pattern(_KIND_TO_PATTERN[args.kind], args.cell, proj))
    jobs = []
    if args.depth:
        jobs.append((read_depth(args.depth), Path(args.out)))
    for z in args.wall:
        vals = np.full((cam.height, cam.width), float(z))
        dm = DepthMap(vals, np.ones_like(vals, dtype=bool))
        suffix = f"_wall{z:g}m.png" if (len(args.wall) > 1 or args.depth) else ""
        out = Path(str(args.out).replace(".png", "") + suffix) if suffix else Path(args.out)
        jobs.append((dm, out))
    if not jobs:
        raise ContractError("project needs --depth or at least one --wall")
    for dm, out in jobs:
        frame = shade_depth_map(dm, cam, proj, ph)
        image_to_png(frame.image, out)
        print(f"wrote {out}")
    return EXIT_OK


def _mask_for(name, w, h):
    return roi_mask({"roi": "roi", "outside": "outside_roi", "full": "full"}[name], w, h)


def _cmd_eval(args):
    manifest = DatasetManifest.load(args.manifest)
    root = Path(args.manifest).parent
    if args.verify:
        verify_manifest(manifest, root)
        print("manifest OK" if not args.json else json.dumps({"verified": True}))
        return EXIT_OK
    if not args.pred:
        raise ContractError("--pred is required unless --verify is given")
    entries = manifest.split_entries(args.split)
    ids = sorted({e["id"] for e in entries})
    if not ids:
        raise ContractError(f"no entries in split {args.split!r}")
    by_id = {e["id"]: e for e in entries}
    pairs = []
    mask = None
    for i in ids:
        gt = read_depth(root / by_id[i]["depth_path"])
        pred = read_depth(Path(args.pred) / f"{i:06d}.pfm")
        if mask is None:
            mask = _mask_for(args.mask, gt.width, gt.height)
        sel = gt.valid & pred.valid & mask.mask
        pairs.append((pred.values[sel], gt.values[sel]))
    report = pooled_metrics(pairs, mode=args.mode)
    if args.bins:
        d = np.concatenate([p[0] for p in pairs])
        g = np.concatenate([p[1] for p in pairs])
        edges = list(np.arange(0.0, 101.0, 10.0))
        for lo, hi in zip(edges[:-1], edges[1:]):
            s = (g >= lo) & (g < hi)
            report.bins.append((lo, hi, metrics_from_pixels(d[s], g[s]) if s.any() else None))
    if args.json:
        print(report.to_json())
    else:
        for k, v in report.to_dict().items():
            if k != "bins":
                print(f"{k}: {v}")
        for lo, hi, r in report.bins:
            print(f"[{lo:5.1f},{hi:5.1f}) " + ("empty" if r is None else f"rmse={r.rmse:.4f}"))
    return EXIT_OK


def _cmd_gradcheck(args):
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.instances):
        base = rng.uniform(1.0, 100.0)
        g = base + rng.uniform(-0.3, 0.3, (args.size, args.size)).cumsum(axis=0).cumsum(axis=1)
        g = np.clip(np.abs(g), 1.0, 100.0)
        d = np.clip(g * rng.uniform(0.7, 1.4, g.shape), 1.0, 120.0)
        for cfg in ABLATION_CONFIGS:
            worst = max(worst, gradcheck(d, g, cfg=cfg, h=args.h, rng=rng))
    worst = float(worst)
    ok = worst < 1e-4
    if args.json:
        print(json.dumps({"max_relative_discrepancy": worst, "pass": ok}))
    else:
        print(f"max relative discrepancy: {worst:.3e} ({'OK' if ok else 'FAIL'})")
    return EXIT_OK if ok else EXIT_CONTRACT


def _cmd_subset(args):
    manifest = DatasetManifest.load(args.manifest)
    ratio = None
    if args.ratio:
        ratio = {}
        for part in args.ratio.split(","):
            k, v = part.split("=")
            ratio[k.strip()] = float(v)
    sub = subset_manifest(manifest, args.fraction, ratio, args.seed)
    sub.save(args.out)
    if args.json:
        print(json.dumps({"out": args.out, "counts": sub.counts}, sort_keys=True))
    else:
        print(f"wrote {args.out} ({sub.counts})")
    return EXIT_OK


def _cmd_pattern(args):
    proj = ProjectorModel()
    pattern = make_pattern(_KIND_TO_PATTERN[args.kind], args.cell, proj)
    ph = apply_photometry(pattern)
    control_path = f"{args.out}_control.png"
    photo_path = f"{args.out}_photometry.png"
    control_to_png(pattern, control_path)
    photometry_to_png(ph, photo_path)
    print(f"wrote {control_path} and {photo_path}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "project": _cmd_project,
    "eval": _cmd_eval,
    "gradcheck": _cmd_gradcheck,
    "subset": _cmd_subset,
    "pattern": _cmd_pattern,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as e:
        return int(e.code or 0)
    except (ContractError, FormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except LedgenError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
