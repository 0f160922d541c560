"""Pinhole camera, rigid poses, the angular projector model and its shadow map.

Conventions (used everywhere in the package): right-handed frames with
x right, y up, z forward; image origin at the top-left corner, u along
columns, v growing downward. Angles are degrees at the API surface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .primitives import cast_rays


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ContractError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ContractError("principal point must lie inside the image")

    @staticmethod
    def from_hfov(hfov_deg, width, height):
        """Square-pixel camera with the given horizontal FOV, centered."""
        f = (width / 2.0) / np.tan(np.radians(hfov_deg) / 2.0)
        return CameraIntrinsics(f, f, width / 2.0 - 0.5, height / 2.0 - 0.5, width, height)


def project(point, cam: CameraIntrinsics):
    """Camera-frame point(s) -> pixel coordinates (u, v). Requires z > 0."""
    p = np.asarray(point, dtype=np.float64)
    z = p[..., 2]
    if np.any(z <= 0):
        raise ContractError("cannot project points with z <= 0")
    u = cam.fx * p[..., 0] / z + cam.cx
    v = cam.cy - cam.fy * p[..., 1] / z
    return np.stack([u, v], axis=-1)


def unproject(px, depth, cam: CameraIntrinsics):
    """Pixel (u, v) and depth (z, meters) -> camera-frame 3-vector."""
    px = np.asarray(px, dtype=np.float64)
    depth = np.asarray(depth, dtype=np.float64)
    if np.any(depth <= 0):
        raise ContractError("depth must be positive")
    x = (px[..., 0] - cam.cx) / cam.fx * depth
    y = -(px[..., 1] - cam.cy) / cam.fy * depth
    return np.stack([x, y, depth * np.ones_like(x)], axis=-1)


def camera_ray_directions(cam: CameraIntrinsics):
    """Unit directions through every pixel center, shape (H, W, 3)."""
    u, v = np.meshgrid(np.arange(cam.width), np.arange(cam.height))
    x = (u - cam.cx) / cam.fx
    y = -(v - cam.cy) / cam.fy
    d = np.stack([x, y, np.ones_like(x)], axis=-1)
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Pose:
    """Rigid transform: p_out = R @ p_in + t."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64)
        if R.shape != (3, 3) or t.shape != (3,):
            raise ContractError("pose needs a 3x3 rotation and a 3-vector")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9):
            raise ContractError("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ContractError("rotation determinant must be +1")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity():
        return Pose(np.eye(3), np.zeros(3))

    @staticmethod
    def from_translation(t):
        return Pose(np.eye(3), np.asarray(t, dtype=np.float64))

    def apply(self, points):
        p = np.asarray(points, dtype=np.float64)
        return p @ self.rotation.T + self.translation

    def compose(self, other: "Pose") -> "Pose":
        """self after other: compose(self, other)(p) = self(other(p))."""
        return Pose(self.rotation @ other.rotation,
                    self.rotation @ other.translation + self.translation)

    def inverse(self) -> "Pose":
        return Pose(self.rotation.T, -self.rotation.T @ self.translation)


# Default rig: camera 1.4 m above ground looking +z; projector is the
# left headlight, 1.2 m left and 0.9 m below the camera (1.5 m separation).
DEFAULT_CAMERA_HEIGHT = 1.4
DEFAULT_PROJECTOR_OFFSET = (-1.2, -0.9, 0.0)


@dataclass(frozen=True)
class ProjectorModel:
    """HD headlight as an angular pixel grid with a tan-angle mapping."""

    cols: int = 132
    rows: int = 28
    hfov_deg: float = 35.0
    vfov_deg: float = 7.0
    pose: Pose = field(default_factory=lambda: Pose.from_translation(DEFAULT_PROJECTOR_OFFSET))
    power: float = 1.0

    def __post_init__(self):
        if self.cols <= 0 or self.rows <= 0:
            raise ContractError("grid size must be positive")
        if self.hfov_deg <= 0 or self.vfov_deg <= 0:
            raise ContractError("FOV must be positive")

    @property
    def hpitch_deg(self):
        return self.hfov_deg / self.cols

    @property
    def vpitch_deg(self):
        return self.vfov_deg / self.rows

    def pixel_angles(self, c, r):
        """Azimuth/elevation (degrees) of pixel centers."""
        c = np.asarray(c)
        r = np.asarray(r)
        if np.any(c < 0) or np.any(c >= self.cols) or np.any(r < 0) or np.any(r >= self.rows):
            raise ContractError("projector pixel index out of range")
        az = ((c + 0.5) / self.cols - 0.5) * self.hfov_deg
        el = ((r + 0.5) / self.rows - 0.5) * self.vfov_deg
        return az, el


def projector_pixel_direction(c, r, proj: ProjectorModel):
    """Unit direction (projector frame) through the center of grid pixel (c, r)."""
    az, el = proj.pixel_angles(c, r)
    d = np.stack(
        [np.tan(np.radians(az)), np.tan(np.radians(el)), np.ones_like(np.asarray(az, dtype=np.float64))],
        axis=-1,
    )
    return d / np.linalg.norm(d, axis=-1, keepdims=True)


def angles_in_projector(point):
    """Projector-frame point -> (azimuth_deg, elevation_deg). Requires z > 0."""
    p = np.asarray(point, dtype=np.float64)
    z = p[..., 2]
    if np.any(z <= 0):
        raise ContractError("point is behind the projector")
    az = np.degrees(np.arctan2(p[..., 0], z))
    el = np.degrees(np.arctan2(p[..., 1], z))
    return az, el


def in_frustum(az_deg, el_deg, proj: ProjectorModel):
    return (np.abs(az_deg) <= proj.hfov_deg / 2.0) & (np.abs(el_deg) <= proj.vfov_deg / 2.0)


@dataclass(frozen=True)
class ShadowMap:
    """Range image (meters) from the projector viewpoint; +inf where no hit."""

    grid: np.ndarray  # (S_h, S_w)
    proj: ProjectorModel
    resolution_factor: int = 4
    bias: float = 0.02

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        if np.any(g[np.isfinite(g)] <= 0):
            raise ContractError("finite shadow ranges must be positive")
        object.__setattr__(self, "grid", g)


def _shadow_grid_angles(proj: ProjectorModel, factor: int):
    sw = proj.cols * factor
    sh = proj.rows * factor
    az = ((np.arange(sw) + 0.5) / sw - 0.5) * proj.hfov_deg
    el = ((np.arange(sh) + 0.5) / sh - 0.5) * proj.vfov_deg
    return az, el


def render_shadow_map(scene, proj: ProjectorModel, cam_pose: Pose | None = None,
                      resolution_factor: int = 4, bias: float = 0.02) -> ShadowMap:
    """Ranges of the nearest scene hit along every shadow-texel ray.

    Scene primitives live in the world frame; `cam_pose` is the camera's
    pose in that frame (identity: scene given directly in camera
    coordinates, which is how most tests set things up).
    """
    cam_pose = cam_pose or Pose.identity()
    world_from_proj = cam_pose.compose(proj.pose)
    az, el = _shadow_grid_angles(proj, resolution_factor)
    ta = np.tan(np.radians(az))
    te = np.tan(np.radians(el))
    dirs = np.stack(
        [np.broadcast_to(ta, (el.size, az.size)),
         np.broadcast_to(te[:, None], (el.size, az.size)),
         np.ones((el.size, az.size))],
        axis=-1,
    )
    dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)
    dirs_world = dirs @ world_from_proj.rotation.T
    t, _ = cast_rays(scene.primitives, world_from_proj.translation, dirs_world)
    return ShadowMap(t, proj, resolution_factor, bias)


def is_lit(points, proj: ProjectorModel, shadow: ShadowMap):
    """Whether camera-frame point(s) receive projector light.

    True iff the point is in front of the projector, inside the frustum,
    and its projector range does not exceed the shadow texel by more
    than the bias.
    """
    p = np.asarray(points, dtype=np.float64)
    scalar = p.ndim == 1
    p = np.atleast_2d(p)
    pp = proj.pose.inverse().apply(p)  # camera frame -> projector frame
    z = pp[..., 2]
    lit = z > 0
    az = np.zeros_like(z)
    el = np.zeros_like(z)
    az[lit] = np.degrees(np.arctan2(pp[lit, 0], z[lit]))
    el[lit] = np.degrees(np.arctan2(pp[lit, 1], z[lit]))
    lit &= in_frustum(az, el, proj)
    sh, sw = shadow.grid.shape
    ci = np.clip(((az / proj.hfov_deg + 0.5) * sw).astype(np.int64), 0, sw - 1)
    ri = np.clip(((el / proj.vfov_deg + 0.5) * sh).astype(np.int64), 0, sh - 1)
    rng = np.linalg.norm(pp, axis=-1)
    lit &= rng <= shadow.grid[ri, ci] + shadow.bias
    return bool(lit[0]) if scalar else lit
