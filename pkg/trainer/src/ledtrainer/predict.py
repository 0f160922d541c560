"""Prediction export: one clipped PFM per frame id of a split, named the
way the generator's `eval` subcommand expects ({id:06d}.pfm)."""

from __future__ import annotations

from pathlib import Path

import torch

from .data import load_split, write_pfm
from .train import load_checkpoint

MAX_DEPTH = 100.0
MIN_DEPTH = 1e-3


def predict(checkpoint_path, manifest_path, out_dir, split: str = "test",
            illumination: str = "led", batch_size: int = 32) -> Path:
    model, cfg = load_checkpoint(checkpoint_path)
    data = load_split(manifest_path, split, illumination, cfg.input_size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with torch.no_grad():
        for i in range(0, len(data), batch_size):
            pred = model(data.images[i : i + batch_size])
            pred = pred.clamp(MIN_DEPTH, MAX_DEPTH)
            for k, frame_id in enumerate(data.ids[i : i + batch_size]):
                write_pfm(out / f"{frame_id:06d}.pfm",
                          pred[k, 0].numpy().astype("float64"))
    return out
