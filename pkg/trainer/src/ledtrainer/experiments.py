"""Experiment protocols: train per-arm models and evaluate through the
generator's `eval` CLI (the trainer never computes metrics itself).

Protocols:
  led_vs_hb     -- pattern vs full-beam training, same-domain testing
  cross_domain  -- 4-row train-domain x test-domain table
  data_fraction -- training-set size sweep {0.1, 0.2, 0.5, 1.0}
  mix_ratio     -- LED share of the training set {0, 0.25, 0.5, 0.75, 1}
  pattern_study -- one arm per illumination kind present in the manifest
  cell_size     -- one arm per provided manifest (one dataset per cell size)
"""

from __future__ import annotations

import json
import subprocess
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import torch

from .config import TrainConfig
from .data import FrameSet, load_split, read_manifest, select_entries
from .predict import predict
from .train import train, train_on

PROTOCOLS = ("led_vs_hb", "cross_domain", "data_fraction", "mix_ratio",
             "pattern_study", "cell_size")
DATA_FRACTIONS = (0.1, 0.2, 0.5, 1.0)
MIX_RATIOS = (0.0, 0.25, 0.5, 0.75, 1.0)


def default_eval_command():
    return [sys.executable, "-m", "ledgen.cli"]


def evaluate(manifest, pred_dir, mask: str = "roi", split: str = "test",
             eval_cmd=None) -> dict:
    """Run the generator's eval CLI on a prediction directory."""
    cmd = list(eval_cmd or default_eval_command())
    cmd += ["eval", "--manifest", str(manifest), "--pred", str(pred_dir),
            "--split", split, "--mask", mask, "--json"]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"eval failed ({proc.returncode}): {proc.stderr.strip()}")
    return json.loads(proc.stdout)


def _arm(manifest, cfg, out_dir, train_illum, test_illum, fraction=None,
         eval_cmd=None, mask="roi"):
    out = Path(out_dir)
    ckpt = train(manifest, cfg, out, illumination=train_illum, fraction=fraction)
    pred_dir = predict(ckpt, manifest, out / "pred", split="test",
                       illumination=test_illum)
    return evaluate(manifest, pred_dir, mask=mask, eval_cmd=eval_cmd)


def _load_mixed_train(manifest_path, led_share, size, seed):
    """Training set with one image per id, led_share of ids using the
    pattern render and the rest the full-beam render."""
    import torch as _torch

    led = load_split(manifest_path, "train", "led", size)
    hb = load_split(manifest_path, "train", "hb", size)
    if led.ids != hb.ids:
        raise ValueError("manifest is not led/hb paired")
    n = len(led.ids)
    n_led = int(round(led_share * n))
    rng = np.random.default_rng(seed)
    led_pick = set(rng.permutation(n)[:n_led].tolist())
    images = _torch.stack([
        led.images[i] if i in led_pick else hb.images[i] for i in range(n)])
    return FrameSet(images=images, depth=led.depth, valid=led.valid, ids=led.ids)


def run_experiment(protocol, manifests, cfg: TrainConfig, out_dir,
                   eval_cmd=None, mask: str = "roi") -> dict:
    """Run one protocol; writes and returns a results table.

    `manifests` is a single path, except for cell_size where it is a
    {label: path} mapping.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}; choose from {PROTOCOLS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []

    if protocol == "led_vs_hb":
        for illum in ("led", "hb"):
            report = _arm(manifests, cfg, out / illum, illum, illum,
                          eval_cmd=eval_cmd, mask=mask)
            rows.append({"arm": illum, "train": illum, "test": illum,
                         "report": report})

    elif protocol == "cross_domain":
        ckpts = {}
        for illum in ("led", "hb"):
            ckpts[illum] = train(manifests, cfg, out / illum, illumination=illum)
        for tr in ("led", "hb"):
            for te in ("led", "hb"):
                pred = predict(ckpts[tr], manifests, out / f"{tr}_to_{te}",
                               split="test", illumination=te)
                rows.append({"arm": f"{tr}->{te}", "train": tr, "test": te,
                             "report": evaluate(manifests, pred, mask=mask,
                                                eval_cmd=eval_cmd)})

    elif protocol == "data_fraction":
        for illum in ("led", "hb"):
            for frac in DATA_FRACTIONS:
                report = _arm(manifests, cfg, out / f"{illum}_{frac:g}",
                              illum, illum, fraction=frac, eval_cmd=eval_cmd,
                              mask=mask)
                rows.append({"arm": f"{illum}@{frac:g}", "train": illum,
                             "test": illum, "fraction": frac, "report": report})

    elif protocol == "mix_ratio":
        val = load_split(manifests, "val", "led", cfg.input_size)
        for share in MIX_RATIOS:
            arm_dir = out / f"mix_{share:g}"
            mixed = _load_mixed_train(manifests, share, cfg.input_size, cfg.seed)
            ckpt = train_on(mixed, val, cfg, arm_dir)
            pred = predict(ckpt, manifests, arm_dir / "pred", split="test",
                           illumination="led")
            rows.append({"arm": f"led_share={share:g}", "led_share": share,
                         "test": "led",
                         "report": evaluate(manifests, pred, mask=mask,
                                            eval_cmd=eval_cmd)})

    elif protocol == "pattern_study":
        _, entries = read_manifest(manifests)
        kinds = sorted({e["illumination"] for e in entries})
        for illum in kinds:
            report = _arm(manifests, cfg, out / illum, illum, illum,
                          eval_cmd=eval_cmd, mask=mask)
            rows.append({"arm": illum, "train": illum, "test": illum,
                         "report": report})

    elif protocol == "cell_size":
        if not isinstance(manifests, dict):
            raise ValueError("cell_size takes a {label: manifest} mapping")
        for label, manifest in sorted(manifests.items()):
            report = _arm(manifest, cfg, out / str(label), "led", "led",
                          eval_cmd=eval_cmd, mask=mask)
            rows.append({"arm": str(label), "train": "led", "test": "led",
                         "report": report})

    table = {"protocol": protocol, "config": cfg.to_dict(), "mask": mask,
             "rows": rows}
    with open(out / "results.json", "w") as f:
        json.dump(table, f, indent=1)
    return table
