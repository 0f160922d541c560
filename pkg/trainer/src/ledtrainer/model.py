"""Small 4-level encoder-decoder with skip connections.

Single grayscale channel in, positive depth map out (softplus head so
log-space losses stay well behaved). Around 1.9M parameters at the
default width of 16.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F


def _block(c_in, c_out):
    # GroupNorm rather than BatchNorm: batches are small and behaviour
    # should not differ between train and eval passes
    groups = min(8, c_out)
    return nn.Sequential(
        nn.Conv2d(c_in, c_out, 3, padding=1),
        nn.GroupNorm(groups, c_out),
        nn.ReLU(inplace=True),
        nn.Conv2d(c_out, c_out, 3, padding=1),
        nn.GroupNorm(groups, c_out),
        nn.ReLU(inplace=True),
    )


class DepthNet(nn.Module):
    def __init__(self, base_channels: int = 16):
        super().__init__()
        c = base_channels
        self.enc1 = _block(1, c)
        self.enc2 = _block(c, 2 * c)
        self.enc3 = _block(2 * c, 4 * c)
        self.enc4 = _block(4 * c, 8 * c)
        self.bottleneck = _block(8 * c, 16 * c)
        self.up4 = nn.ConvTranspose2d(16 * c, 8 * c, 2, stride=2)
        self.dec4 = _block(16 * c, 8 * c)
        self.up3 = nn.ConvTranspose2d(8 * c, 4 * c, 2, stride=2)
        self.dec3 = _block(8 * c, 4 * c)
        self.up2 = nn.ConvTranspose2d(4 * c, 2 * c, 2, stride=2)
        self.dec2 = _block(4 * c, 2 * c)
        self.up1 = nn.ConvTranspose2d(2 * c, c, 2, stride=2)
        self.dec1 = _block(2 * c, c)
        # the head predicts log-depth: the useful range (0.5 m .. 100 m)
        # is then only ~5 units wide instead of ~100
        self.head = nn.Conv2d(c, 1, 1)
        nn.init.constant_(self.head.bias, math.log(15.0))

    def forward(self, x):
        e1 = self.enc1(x)
        e2 = self.enc2(F.max_pool2d(e1, 2))
        e3 = self.enc3(F.max_pool2d(e2, 2))
        e4 = self.enc4(F.max_pool2d(e3, 2))
        b = self.bottleneck(F.max_pool2d(e4, 2))
        d4 = self.dec4(torch.cat([self.up4(b), e4], dim=1))
        d3 = self.dec3(torch.cat([self.up3(d4), e3], dim=1))
        d2 = self.dec2(torch.cat([self.up2(d3), e2], dim=1))
        d1 = self.dec1(torch.cat([self.up1(d2), e1], dim=1))
        return torch.exp(self.head(d1).clamp(-2.0, 5.5))

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())
