"""Torch mirror of the generator's training objective.

Same definitions: forward differences with a replicate boundary, terms
averaged over the number of valid pixels, differences that straddle an
invalid pixel dropped. Batched inputs pool the valid-pixel count across
the batch.
"""

from __future__ import annotations

import torch

from .config import TrainConfig


def _forward_diffs(a):
    gx = torch.zeros_like(a)
    gy = torch.zeros_like(a)
    gx[..., :, :-1] = a[..., :, 1:] - a[..., :, :-1]
    gy[..., :-1, :] = a[..., 1:, :] - a[..., :-1, :]
    return gx, gy


def _active_masks(valid):
    ax = torch.zeros_like(valid)
    ay = torch.zeros_like(valid)
    ax[..., :, :-1] = valid[..., :, :-1] & valid[..., :, 1:]
    ay[..., :-1, :] = valid[..., :-1, :] & valid[..., 1:, :]
    return ax, ay


def depth_term(d, g, valid, variant="log_l1", epsilon=1e-6):
    n = valid.sum()
    if variant == "log_l1":
        e = torch.log(d.clamp_min(epsilon)) - torch.log(g.clamp_min(epsilon))
    else:
        e = d - g
    return (e.abs() * valid).sum() / n


def grad_term(d, g, valid, variant="l1", epsilon=1e-6):
    n = valid.sum()
    if variant == "log_l1":
        a = torch.log(d.clamp_min(epsilon))
        b = torch.log(g.clamp_min(epsilon))
    else:
        a, b = d, g
    dax, day = _forward_diffs(a)
    dbx, dby = _forward_diffs(b)
    ax, ay = _active_masks(valid)
    ex = (dax - dbx) * ax
    ey = (day - dby) * ay
    return (ex.abs().sum() + ey.abs().sum()) / n


def normal_term(d, g, valid):
    n = valid.sum()
    ddx, ddy = _forward_diffs(d)
    dgx, dgy = _forward_diffs(g)
    ax, ay = _active_masks(valid)
    ones = torch.ones_like(d)
    nd = torch.stack([-ddx * ax, -ddy * ay, ones], dim=-1)
    ng = torch.stack([-dgx * ax, -dgy * ay, ones], dim=-1)
    cos = (nd * ng).sum(-1) / (nd.norm(dim=-1) * ng.norm(dim=-1))
    return ((1.0 - cos).abs() * valid).sum() / n


def total_loss(d, g, valid, cfg: TrainConfig):
    """Weighted sum of the three terms; returns (total, parts dict)."""
    valid = valid.to(torch.bool)
    vd = depth_term(d, g, valid, cfg.depth_variant, cfg.epsilon)
    parts = {"depth": float(vd.detach())}
    total = vd
    if cfg.lambda1 > 0:
        vg = grad_term(d, g, valid, cfg.grad_variant, cfg.epsilon)
        total = total + cfg.lambda1 * vg
        parts["grad"] = float(vg.detach())
    else:
        parts["grad"] = 0.0
    if cfg.use_normal and cfg.lambda2 > 0:
        vn = normal_term(d, g, valid)
        total = total + cfg.lambda2 * vn
        parts["normal"] = float(vn.detach())
    else:
        parts["normal"] = 0.0
    return total, parts
