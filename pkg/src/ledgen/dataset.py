"""Dataset materialization: paired pattern/high-beam frames, manifest,
preprocessing, and subset/mixing utilities.

A dataset directory holds one manifest.json plus, per frame id, a single
ground-truth depth file shared by every illumination and one rendered
image per illumination kind. Split assignment is a pure function of
map_id: maps 0-2 train, 3 val, 4 test.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, FormatError
from .geometry import (
    DEFAULT_CAMERA_HEIGHT,
    CameraIntrinsics,
    Pose,
    ProjectorModel,
    render_shadow_map,
)
from .io import read_depth, write_depth
from .metrics import MetricsReport
from .patterns import apply_photometry, make_pattern
from .render import image_to_png, rig_hash, shade
from .scene import DepthMap, SceneConfig, clip_depth, generate_scene, raycast_depth

MANIFEST_VERSION = 1
ILLUMINATION_KINDS = ("led", "hb", "hl", "vl")
_KIND_TO_PATTERN = {"led": "checkerboard", "hb": "high_beam", "hl": "hlines", "vl": "vlines"}

SPLIT_BY_MAP = {0: "train", 1: "train", 2: "train", 3: "val", 4: "test"}


def split_for_map(map_id: int) -> str:
    return SPLIT_BY_MAP[map_id % 5]


@dataclass
class PreprocessSpec:
    crop: int = 640
    out_size: int = 320

    def __post_init__(self):
        if self.out_size <= 0 or self.crop <= 0:
            raise ContractError("crop and out_size must be positive")


def center_crop_resize(data, spec: PreprocessSpec, is_depth: bool = False):
    """Center-crop a square of spec.crop pixels, then resize to out_size.

    Images are resized bilinearly; depth maps use nearest neighbor so no
    depth value is invented by interpolation (DepthMap masks propagate
    by nearest too).
    """
    import cv2

    if isinstance(data, DepthMap):
        vals = center_crop_resize(data.values, spec, is_depth=True)
        valid = center_crop_resize(data.valid.astype(np.uint8), spec, is_depth=True)
        return DepthMap(vals, valid.astype(bool), data.max_depth)
    arr = np.asarray(data)
    h, w = arr.shape[:2]
    c = spec.crop
    if c > min(h, w):
        raise ContractError(f"crop {c} exceeds source dimensions {w}x{h}")
    x0 = (w - c) // 2
    y0 = (h - c) // 2
    win = arr[y0 : y0 + c, x0 : x0 + c]
    interp = cv2.INTER_NEAREST if is_depth else cv2.INTER_LINEAR
    out = cv2.resize(win.astype(np.float64), (spec.out_size, spec.out_size), interpolation=interp)
    return out


def default_camera(size: int = 320, hfov_deg: float = 50.0) -> CameraIntrinsics:
    return CameraIntrinsics.from_hfov(hfov_deg, size, size)


def default_rig(size: int = 320):
    cam = default_camera(size)
    cam_pose = Pose.from_translation((0.0, DEFAULT_CAMERA_HEIGHT, 0.0))
    proj = ProjectorModel()
    return cam, cam_pose, proj


@dataclass
class DatasetManifest:
    version: int
    rig: str
    entries: list  # dicts: id, image_path, depth_path, illumination, cell_deg, seed, map_id, split

    @property
    def counts(self):
        c = {"train": 0, "val": 0, "test": 0}
        for e in self.entries:
            c[e["split"]] += 1
        return c

    def to_dict(self):
        return {
            "version": self.version,
            "rig": self.rig,
            "counts": self.counts,
            "entries": self.entries,
        }

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, sort_keys=True, indent=1)
            f.write("\n")

    @staticmethod
    def load(path) -> "DatasetManifest":
        with open(path) as f:
            d = json.load(f)
        if d.get("version") != MANIFEST_VERSION:
            raise FormatError(f"unsupported manifest version {d.get('version')}")
        return DatasetManifest(d["version"], d["rig"], d["entries"])

    def split_entries(self, split: str):
        return [e for e in self.entries if e["split"] == split]


def _frame_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def materialize_dataset(out_dir, count: int, seed: int = 0, kinds=("led", "hb"),
                        config: SceneConfig | None = None, cell_deg: float = 0.5,
                        size: int = 320, threads: int | None = None) -> DatasetManifest:
    """Generate `count` scenes, render each under every illumination kind."""
    for k in kinds:
        if k not in ILLUMINATION_KINDS:
            raise ContractError(f"unknown illumination kind {k!r}")
    config = config or SceneConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cam, cam_pose, proj = default_rig(size)
    photometries = {
        k: apply_photometry(make_pattern(_KIND_TO_PATTERN[k], cell_deg, proj))
        for k in kinds
    }
    if threads is None:
        threads = int(os.environ.get("LEDGEN_THREADS", "1"))

    def build_frame(i):
        fseed = _frame_seed(seed, i)
        map_id = i % 5
        scene = generate_scene(fseed, config, map_id)
        rc = raycast_depth(scene, cam, cam_pose)
        gt = clip_depth(rc.depth, rc.depth.max_depth)
        shadow = render_shadow_map(scene, proj, cam_pose)
        depth_path = f"{i:06d}.pfm"
        write_depth(out / depth_path, gt)
        entries = []
        for k in kinds:
            frame = shade(rc, scene, cam, proj, photometries[k], cam_pose=cam_pose, shadow=shadow)
            image_path = f"{i:06d}_{k}.png"
            image_to_png(frame.image, out / image_path)
            entries.append(
                {
                    "id": i,
                    "image_path": image_path,
                    "depth_path": depth_path,
                    "illumination": k,
                    "cell_deg": cell_deg if k != "hb" else None,
                    "seed": fseed,
                    "map_id": map_id,
                    "split": split_for_map(map_id),
                }
            )
        return entries

    all_entries = []
    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for chunk in pool.map(build_frame, range(count)):
                    all_entries.extend(chunk)
        else:
            for i in range(count):
                all_entries.extend(build_frame(i))
    except OSError:
        for p in out.glob("*.pfm"):
            p.unlink(missing_ok=True)
        for p in out.glob("*.png"):
            p.unlink(missing_ok=True)
        raise
    all_entries.sort(key=lambda e: (e["id"], e["illumination"]))
    manifest = DatasetManifest(MANIFEST_VERSION, rig_hash(cam, proj), all_entries)
    manifest.save(out / "manifest.json")
    return manifest


def subset_manifest(manifest: DatasetManifest, fraction: float | None = None,
                    ratio: dict | None = None, seed: int = 0) -> DatasetManifest:
    """Deterministic train-split subsampling and LED/HB mixing.

    fraction: keep that share of training ids (val/test untouched).
    ratio: e.g. {"led": 0.1, "hb": 0.9} -- per training id keep exactly
    one illumination, hitting the requested mix within one entry.
    """
    entries = list(manifest.entries)
    train = [e for e in entries if e["split"] == "train"]
    rest = [e for e in entries if e["split"] != "train"]
    rng = np.random.default_rng(seed)

    if fraction is not None:
        if not (0 < fraction <= 1):
            raise ContractError("fraction must be in (0, 1]")
        ids = sorted({e["id"] for e in train})
        keep_n = int(round(fraction * len(ids)))
        if keep_n == 0:
            raise ContractError("fraction leaves zero training ids")
        keep = set(np.array(ids)[rng.permutation(len(ids))[:keep_n]].tolist())
        train = [e for e in train if e["id"] in keep]

    if ratio is not None:
        if abs(sum(ratio.values()) - 1.0) > 1e-9:
            raise ContractError("ratio weights must sum to 1")
        ids = sorted({e["id"] for e in train})
        by_id = {}
        for e in train:
            by_id.setdefault(e["id"], {})[e["illumination"]] = e
        order = np.array(ids)[rng.permutation(len(ids))]
        kinds = sorted(ratio)
        quotas = {k: int(round(ratio[k] * len(ids))) for k in kinds}
        # rounding may drop/add one id; give the remainder to the largest share
        drift = len(ids) - sum(quotas.values())
        quotas[max(kinds, key=lambda k: ratio[k])] += drift
        picked = []
        used = {k: 0 for k in kinds}
        for i in order:
            for k in kinds:
                if used[k] < quotas[k] and k in by_id[int(i)]:
                    picked.append(by_id[int(i)][k])
                    used[k] += 1
                    break
            else:
                raise ContractError(f"id {i} has none of the requested illuminations")
        train = sorted(picked, key=lambda e: (e["id"], e["illumination"]))

    return DatasetManifest(manifest.version, manifest.rig, train + rest)


def verify_manifest(manifest: DatasetManifest, root) -> None:
    """Check every referenced file exists, parses, and has matching dims."""
    root = Path(root)
    from PIL import Image

    dims = {}
    for e in manifest.entries:
        dpath = root / e["depth_path"]
        ipath = root / e["image_path"]
        if not dpath.exists():
            raise FormatError(f"missing depth file {dpath}")
        if not ipath.exists():
            raise FormatError(f"missing image file {ipath}")
        dm = read_depth(dpath)
        with Image.open(ipath) as img:
            if img.size != (dm.width, dm.height):
                raise FormatError(f"dimension mismatch for id {e['id']}")
        dims[e["id"]] = (dm.width, dm.height)


def load_pair(manifest: DatasetManifest, root, entry) -> tuple:
    """(image [0,1] float array, DepthMap) for one manifest entry."""
    from PIL import Image

    root = Path(root)
    with Image.open(root / entry["image_path"]) as img:
        image = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
    depth = read_depth(root / entry["depth_path"])
    return image, depth
