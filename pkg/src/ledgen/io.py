"""Depth-map file formats: PFM (lossless float) and 16-bit PNG (centimeters).

PFM: grayscale "Pf", little-endian (scale -1.0), bottom row first.
Invalid pixels are stored as 0.0; on read they come back as +inf with a
false valid mask, so write/read round-trips exactly.

PNG16: depth in centimeters as uint16, 0 reserved for invalid; values
above 655.35 m are unrepresentable and rejected.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, FormatError
from .scene import DepthMap


def write_pfm(path, depth: DepthMap):
    values = np.where(depth.valid, depth.values, 0.0).astype("<f4")
    if np.any(values[depth.valid] <= 0):
        raise ContractError("valid depths must be positive for PFM export")
    h, w = values.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode())
        f.write(b"-1.0\n")
        f.write(np.flipud(values).tobytes())


def read_pfm(path) -> DepthMap:
    with open(path, "rb") as f:
        header = f.readline().strip()
        if header != b"Pf":
            raise FormatError(f"not a grayscale PFM file: header {header!r}")
        dims = f.readline().split()
        if len(dims) != 2:
            raise FormatError("malformed PFM dimension line")
        w, h = int(dims[0]), int(dims[1])
        scale = float(f.readline())
        data = f.read(w * h * 4)
        if len(data) != w * h * 4:
            raise FormatError("truncated PFM payload")
    dt = "<f4" if scale < 0 else ">f4"
    arr = np.flipud(np.frombuffer(data, dtype=dt).reshape(h, w)).astype(np.float64)
    valid = arr > 0
    values = np.where(valid, arr, np.inf)
    return DepthMap(values, valid)


def write_png16(path, depth: DepthMap):
    from PIL import Image

    vals = depth.values[depth.valid]
    if vals.size and float(vals.max()) > 655.35:
        raise ContractError("png16 stores centimeters in uint16; max depth is 655.35 m")
    cm = np.where(depth.valid, np.round(depth.values * 100.0), 0.0).astype(np.uint16)
    # a valid pixel quantized to 0 cm would read back as invalid
    cm[depth.valid & (cm == 0)] = 1
    Image.fromarray(cm).save(path)


def read_png16(path) -> DepthMap:
    from PIL import Image

    img = Image.open(path)
    if img.mode not in ("I;16", "I"):
        raise FormatError(f"expected 16-bit grayscale PNG, got mode {img.mode}")
    cm = np.asarray(img, dtype=np.uint16)
    valid = cm > 0
    values = np.where(valid, cm / 100.0, np.inf)
    return DepthMap(values, valid)


def write_depth(path, depth: DepthMap, fmt: str = "pfm"):
    if fmt == "pfm":
        write_pfm(path, depth)
    elif fmt == "png16":
        write_png16(path, depth)
    else:
        raise ContractError(f"unknown depth format {fmt!r}")


def read_depth(path, fmt: str | None = None) -> DepthMap:
    if fmt is None:
        fmt = "pfm" if str(path).endswith(".pfm") else "png16"
    if fmt == "pfm":
        return read_pfm(path)
    if fmt == "png16":
        return read_png16(path)
    raise ContractError(f"unknown depth format {fmt!r}")
