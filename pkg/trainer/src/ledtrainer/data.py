"""Reading the generator's external formats: manifest JSON, PFM depth
maps, 8-bit grayscale PNG renders.

This package deliberately re-implements the file formats instead of
importing the generator: the two sides are coupled only through what is
on disk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MANIFEST_VERSION = 1


def read_pfm(path):
    """Grayscale PFM -> (values float64 array, valid bool array).

    Invalid pixels are stored as 0 and come back with valid=False.
    """
    with open(path, "rb") as f:
        if f.readline().strip() != b"Pf":
            raise ValueError(f"{path}: not a grayscale PFM")
        w, h = (int(x) for x in f.readline().split())
        scale = float(f.readline())
        data = f.read(w * h * 4)
    if len(data) != w * h * 4:
        raise ValueError(f"{path}: truncated PFM payload")
    arr = np.frombuffer(data, dtype="<f4" if scale < 0 else ">f4")
    arr = np.flipud(arr.reshape(h, w)).astype(np.float64)
    return arr, arr > 0


def write_pfm(path, values, valid=None):
    """Write a grayscale PFM (little endian, bottom row first)."""
    values = np.asarray(values, dtype=np.float64)
    if valid is None:
        valid = np.ones(values.shape, dtype=bool)
    out = np.where(valid, values, 0.0).astype("<f4")
    h, w = out.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode())
        f.write(b"-1.0\n")
        f.write(np.flipud(out).tobytes())


def read_image(path):
    """8-bit grayscale PNG -> float64 array in [0, 1]."""
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.float64) / 255.0


def read_manifest(path):
    """Load a dataset manifest; returns (root directory, entry list)."""
    path = Path(path)
    with open(path) as f:
        d = json.load(f)
    if d.get("version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported manifest version {d.get('version')}")
    return path.parent, d["entries"]


def select_entries(entries, split, illumination=None):
    out = [e for e in entries if e["split"] == split]
    if illumination is not None:
        out = [e for e in out if e["illumination"] == illumination]
    return sorted(out, key=lambda e: e["id"])


def subset_ids(ids, fraction, seed=0):
    """Keep a deterministic share of the given frame ids."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    ids = sorted(ids)
    rng = np.random.default_rng(seed)
    keep = int(round(fraction * len(ids)))
    if keep == 0:
        raise ValueError("fraction leaves no frames")
    return set(np.array(ids)[rng.permutation(len(ids))[:keep]].tolist())


@dataclass
class FrameSet:
    """Preloaded tensors for one split: images, depth, validity, ids."""

    images: "object"  # torch.Tensor (N, 1, H, W)
    depth: "object"  # torch.Tensor (N, 1, H, W)
    valid: "object"  # torch.Tensor bool (N, 1, H, W)
    ids: list

    def __len__(self):
        return len(self.ids)


def load_split(manifest_path, split, illumination, expected_size=None,
               fraction=None, seed=0) -> FrameSet:
    import torch

    root, entries = read_manifest(manifest_path)
    picked = select_entries(entries, split, illumination)
    if fraction is not None:
        keep = subset_ids([e["id"] for e in picked], fraction, seed)
        picked = [e for e in picked if e["id"] in keep]
    if not picked:
        raise ValueError(f"no {illumination!r} entries in split {split!r}")
    images, depths, valids, ids = [], [], [], []
    for e in picked:
        img = read_image(root / e["image_path"])
        dep, val = read_pfm(root / e["depth_path"])
        if expected_size is not None and img.shape != (expected_size, expected_size):
            raise ValueError(
                f"id {e['id']}: image is {img.shape}, expected {expected_size}")
        if img.shape != dep.shape:
            raise ValueError(f"id {e['id']}: image/depth dimension mismatch")
        images.append(img)
        depths.append(np.where(val, dep, 1.0))  # placeholder under the mask
        valids.append(val)
        ids.append(e["id"])
    return FrameSet(
        images=torch.tensor(np.stack(images), dtype=torch.float32).unsqueeze(1),
        depth=torch.tensor(np.stack(depths), dtype=torch.float32).unsqueeze(1),
        valid=torch.tensor(np.stack(valids)).unsqueeze(1),
        ids=ids,
    )
