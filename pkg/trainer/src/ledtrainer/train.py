"""Training loop: AdamW, fixed seeds, best-validation-RMSE checkpoint,
JSON log, hard abort on non-finite loss."""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path

import numpy as np
import torch

from .config import TrainConfig
from .data import FrameSet, load_split
from .losses import total_loss
from .model import DepthNet


def _check_finite(value: float, epoch: int, batch: int):
    if not math.isfinite(value):
        raise RuntimeError(
            f"non-finite loss {value} at epoch {epoch}, batch {batch}; "
            "lower the learning rate or inspect the inputs")


@torch.no_grad()
def val_rmse(model, data: FrameSet, batch_size: int = 32) -> float:
    model.eval()
    se = 0.0
    n = 0
    for i in range(0, len(data), batch_size):
        pred = model(data.images[i : i + batch_size])
        g = data.depth[i : i + batch_size]
        v = data.valid[i : i + batch_size]
        se += float(((pred - g) ** 2 * v).sum())
        n += int(v.sum())
    return math.sqrt(se / n)


def train_on(train_set: FrameSet, val_set: FrameSet, cfg: TrainConfig,
             out_dir) -> Path:
    """Train on preloaded frame sets; returns the checkpoint path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    model = DepthNet(cfg.base_channels)
    opt = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate,
                            weight_decay=cfg.weight_decay)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=cfg.epochs)
    best = math.inf
    best_state = copy.deepcopy(model.state_dict())
    best_epoch = -1
    log = []
    for epoch in range(cfg.epochs):
        model.train()
        order = rng.permutation(len(train_set))
        epoch_parts = {"depth": 0.0, "grad": 0.0, "normal": 0.0}
        epoch_loss = 0.0
        n_batches = 0
        for b, start in enumerate(range(0, len(order), cfg.batch_size)):
            idx = torch.tensor(order[start : start + cfg.batch_size])
            pred = model(train_set.images[idx])
            loss, parts = total_loss(pred, train_set.depth[idx],
                                     train_set.valid[idx], cfg)
            loss_val = float(loss.detach())
            _check_finite(loss_val, epoch, b)
            opt.zero_grad()
            loss.backward()
            opt.step()
            epoch_loss += loss_val
            for k in epoch_parts:
                epoch_parts[k] += parts[k]
            n_batches += 1
        sched.step()
        rmse = val_rmse(model, val_set, cfg.batch_size)
        entry = {"epoch": epoch, "loss": epoch_loss / n_batches,
                 "val_rmse": rmse}
        entry.update({k: v / n_batches for k, v in epoch_parts.items()})
        log.append(entry)
        if rmse < best:
            best = rmse
            best_state = copy.deepcopy(model.state_dict())
            best_epoch = epoch
    ckpt_path = out / "checkpoint.pt"
    torch.save({"state_dict": best_state, "config": cfg.to_dict(),
                "val_rmse": best, "epoch": best_epoch}, ckpt_path)
    with open(out / "train_log.json", "w") as f:
        json.dump({"config": cfg.to_dict(), "best_val_rmse": best,
                   "best_epoch": best_epoch, "epochs": log}, f, indent=1)
    return ckpt_path


def train(manifest_path, cfg: TrainConfig, out_dir, illumination: str = "led",
          fraction: float | None = None) -> Path:
    """Train from a manifest; fraction optionally subsamples training ids."""
    train_set = load_split(manifest_path, "train", illumination,
                           cfg.input_size, fraction, cfg.seed)
    val_set = load_split(manifest_path, "val", illumination, cfg.input_size)
    return train_on(train_set, val_set, cfg, out_dir)


def load_checkpoint(path):
    ckpt = torch.load(path, map_location="cpu", weights_only=True)
    cfg = TrainConfig.from_dict(ckpt["config"])
    model = DepthNet(cfg.base_channels)
    model.load_state_dict(ckpt["state_dict"])
    model.eval()
    return model, cfg
