"""Analytic scene primitives with exact ray intersection and normals.

All primitives live in the camera/world frame (right-handed, x right,
y up, z forward). Rays are given as an origin plus unit or non-unit
direction vectors; intersections return the ray parameter t (distance
if the direction is unit length), +inf on miss.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

_EPS = 1e-12


@dataclass(frozen=True)
class GroundPlane:
    """Infinite horizontal plane at y = 0."""

    albedo: float = 0.3

    def __post_init__(self):
        _check_albedo(self.albedo)

    def intersect(self, origin, dirs):
        dy = dirs[..., 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -origin[1] / dy
        t = np.where((np.abs(dy) > _EPS) & (t > _EPS), t, np.inf)
        return t

    def normal_at(self, points):
        n = np.zeros_like(points)
        n[..., 1] = 1.0
        return n


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by min/max corners in meters."""

    lo: tuple
    hi: tuple
    albedo: float = 0.5

    def __post_init__(self):
        _check_albedo(self.albedo)
        if not all(h > l for l, h in zip(self.lo, self.hi)):
            raise ContractError(f"box extents must be positive: {self.lo} {self.hi}")

    def intersect(self, origin, dirs):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / dirs
        t0 = (lo - origin) * inv
        t1 = (hi - origin) * inv
        tnear = np.max(np.minimum(t0, t1), axis=-1)
        tfar = np.min(np.maximum(t0, t1), axis=-1)
        hit = (tnear <= tfar) & (tfar > _EPS)
        t = np.where(tnear > _EPS, tnear, tfar)  # inside the box: exit face
        return np.where(hit, t, np.inf)

    def normal_at(self, points):
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        # distance of the hit point to each of the six faces
        d = np.stack(
            [
                np.abs(points[..., 0] - lo[0]),
                np.abs(points[..., 0] - hi[0]),
                np.abs(points[..., 1] - lo[1]),
                np.abs(points[..., 1] - hi[1]),
                np.abs(points[..., 2] - lo[2]),
                np.abs(points[..., 2] - hi[2]),
            ],
            axis=-1,
        )
        face = np.argmin(d, axis=-1)
        normals = np.array(
            [
                [-1, 0, 0],
                [1, 0, 0],
                [0, -1, 0],
                [0, 1, 0],
                [0, 0, -1],
                [0, 0, 1],
            ],
            dtype=np.float64,
        )
        return normals[face]


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float
    albedo: float = 0.5

    def __post_init__(self):
        _check_albedo(self.albedo)
        if self.radius <= 0:
            raise ContractError(f"sphere radius must be positive: {self.radius}")

    def intersect(self, origin, dirs):
        oc = origin - np.asarray(self.center, dtype=np.float64)
        a = np.sum(dirs * dirs, axis=-1)
        b = 2.0 * np.sum(dirs * oc, axis=-1)
        c = float(np.dot(oc, oc)) - self.radius**2
        disc = b * b - 4 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        t0 = (-b - sq) / (2 * a)
        t1 = (-b + sq) / (2 * a)
        t = np.where(t0 > _EPS, t0, t1)
        return np.where((disc >= 0) & (t > _EPS), t, np.inf)

    def normal_at(self, points):
        n = points - np.asarray(self.center)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Wall:
    """Finite vertical rectangle, normal along x or z.

    axis 'z': plane z = offset, spanning x in span and y in y_span.
    axis 'x': plane x = offset, spanning z in span and y in y_span.
    """

    axis: str
    offset: float
    span: tuple
    y_span: tuple
    albedo: float = 0.4

    def __post_init__(self):
        _check_albedo(self.albedo)
        if self.axis not in ("x", "z"):
            raise ContractError(f"wall axis must be 'x' or 'z', got {self.axis!r}")
        if self.span[1] <= self.span[0] or self.y_span[1] <= self.y_span[0]:
            raise ContractError("wall spans must be non-empty")

    def intersect(self, origin, dirs):
        k = 0 if self.axis == "x" else 2
        other = 2 if self.axis == "x" else 0
        dk = dirs[..., k]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (self.offset - origin[k]) / dk
        po = origin[other] + t * dirs[..., other]
        py = origin[1] + t * dirs[..., 1]
        ok = (
            (np.abs(dk) > _EPS)
            & (t > _EPS)
            & (po >= self.span[0])
            & (po <= self.span[1])
            & (py >= self.y_span[0])
            & (py <= self.y_span[1])
        )
        return np.where(ok, t, np.inf)

    def normal_at(self, points):
        n = np.zeros_like(points)
        k = 0 if self.axis == "x" else 2
        n[..., k] = 1.0
        return n


def _check_albedo(a):
    if not (0.0 <= a <= 1.0):
        raise ContractError(f"albedo must be in [0, 1], got {a}")


def cast_rays(primitives, origin, dirs):
    """Nearest intersection over a primitive list.

    Returns (t, index) where t is +inf and index -1 for misses.
    dirs may have any leading shape with a trailing axis of 3.
    """
    origin = np.asarray(origin, dtype=np.float64)
    dirs = np.asarray(dirs, dtype=np.float64)
    best_t = np.full(dirs.shape[:-1], np.inf)
    best_i = np.full(dirs.shape[:-1], -1, dtype=np.int64)
    for i, prim in enumerate(primitives):
        t = prim.intersect(origin, dirs)
        closer = t < best_t
        best_t = np.where(closer, t, best_t)
        best_i = np.where(closer, i, best_i)
    return best_t, best_i
