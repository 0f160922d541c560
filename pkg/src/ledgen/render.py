"""Shading of ray-cast scenes under the projected headlight pattern.

Radiometry is single-channel and deliberately simple so every term is
analytically checkable: inverse-square falloff, Lambertian incidence,
shadow-map occlusion, flat ambient, unpatterned interfering lights, and
a display gamma at the very end.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, MeasurementError
from .geometry import CameraIntrinsics, Pose, ProjectorModel, ShadowMap, is_lit, render_shadow_map
from .patterns import Photometry, sample_intensity
from .scene import DepthMap, RaycastResult, Scene


@dataclass(frozen=True)
class ShadingParams:
    projector_power: float = 1.0
    ambient_gain: float = 1e-5  # pre-gamma intensity per lux
    gamma: float = 2.2
    exposure: float = 160.0  # 10 m albedo-0.5 wall at full pattern -> ~0.8 pre-clamp
    noise_sigma: float = 0.0  # Gaussian image noise hook, off by default

    def __post_init__(self):
        if min(self.projector_power, self.ambient_gain, self.gamma, self.exposure) <= 0:
            raise ContractError("shading parameters must be positive")


@dataclass
class RenderedFrame:
    image: np.ndarray  # (H, W) in [0, 1]
    depth: DepthMap
    meta: dict
    irradiance: np.ndarray  # (H, W) pre-gamma, pre-exposure irradiance E


def rig_hash(cam: CameraIntrinsics, proj: ProjectorModel) -> str:
    blob = json.dumps(
        {
            "cam": [cam.fx, cam.fy, cam.cx, cam.cy, cam.width, cam.height],
            "proj": [proj.cols, proj.rows, proj.hfov_deg, proj.vfov_deg, proj.power,
                     proj.pose.rotation.tolist(), proj.pose.translation.tolist()],
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def shade(rc: RaycastResult, scene: Scene, cam: CameraIntrinsics, proj: ProjectorModel,
          photometry: Photometry, params: ShadingParams | None = None,
          cam_pose: Pose | None = None, shadow: ShadowMap | None = None,
          meta_extra: dict | None = None) -> RenderedFrame:
    """Render the intensity image matching a ray-cast result."""
    params = params or ShadingParams()
    cam_pose = cam_pose or Pose.identity()
    if rc.depth.values.shape != (cam.height, cam.width):
        raise ContractError("ray-cast result does not match the camera dimensions")
    if shadow is None:
        shadow = render_shadow_map(scene, proj, cam_pose)

    valid = rc.depth.valid
    H, W = valid.shape
    E = np.zeros((H, W))

    pts = rc.points[valid]  # camera frame
    normals = rc.normals[valid]

    # headlight term
    pp = proj.pose.inverse().apply(pts)
    r = np.linalg.norm(pp, axis=-1)
    front = pp[..., 2] > 0
    inten = np.zeros(len(pts))
    if np.any(front):
        az = np.degrees(np.arctan2(pp[front, 0], pp[front, 2]))
        el = np.degrees(np.arctan2(pp[front, 1], pp[front, 2]))
        inten[front] = sample_intensity(photometry, az, el)
    proj_pos = proj.pose.translation
    to_pt = pts - proj_pos
    to_pt /= np.linalg.norm(to_pt, axis=-1, keepdims=True)
    cos_inc = np.maximum(0.0, -np.sum(normals * to_pt, axis=-1))
    lit = is_lit(pts, proj, shadow)
    e = params.projector_power * proj.power * inten * cos_inc / r**2 * lit

    # interfering headlights: unpatterned point lights, no occlusion test
    cam_from_world = cam_pose.inverse()
    for light in scene.interferers:
        lp = cam_from_world.apply(np.asarray(light.position, dtype=np.float64))
        d = pts - lp
        ri = np.linalg.norm(d, axis=-1)
        d /= ri[..., None]
        e += light.power * np.maximum(0.0, -np.sum(normals * d, axis=-1)) / ri**2

    e += params.ambient_gain * scene.ambient_lux
    E[valid] = e

    img = np.zeros((H, W))
    img[valid] = np.clip(params.exposure * rc.albedo[valid] * E[valid], 0.0, 1.0)
    sky = np.clip(params.exposure * params.ambient_gain * scene.ambient_lux, 0.0, 1.0)
    img[~valid] = sky
    img = img ** (1.0 / params.gamma)
    if params.noise_sigma > 0:
        rng = np.random.default_rng(scene.seed)
        img = np.clip(img + rng.normal(0.0, params.noise_sigma, img.shape), 0.0, 1.0)

    meta = {
        "seed": scene.seed,
        "illumination": photometry.base.kind if photometry.base.kind != "checkerboard" else "led",
        "cell_deg": photometry.base.cell_deg,
        "ambient_lux": scene.ambient_lux,
        "rig": rig_hash(cam, proj),
    }
    if photometry.base.kind == "high_beam":
        meta["illumination"] = "hb"
    if meta_extra:
        meta.update(meta_extra)
    return RenderedFrame(img, rc.depth, meta, E)


def shade_depth_map(depth: DepthMap, cam: CameraIntrinsics, proj: ProjectorModel,
                    photometry: Photometry, params: ShadingParams | None = None,
                    albedo: float = 0.5) -> RenderedFrame:
    """Paint the pattern onto a bare depth map (no scene, no occlusion).

    Points are unprojected from the depth map, normals estimated by
    finite differences; every in-frustum point is treated as lit. Used
    by the `project` CLI to visualize pattern deformation on captured
    or synthetic depth images.
    """
    from .geometry import camera_ray_directions

    params = params or ShadingParams()
    H, W = depth.values.shape
    dirs = camera_ray_directions(cam)
    z = np.where(depth.valid, depth.values, 1.0)
    pts = dirs * (z / dirs[..., 2])[..., None]

    # normals from central differences of the 3-D points
    px = np.gradient(pts, axis=1)
    py = np.gradient(pts, axis=0)
    n = np.cross(py, px)
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    n = np.divide(n, norm, out=np.zeros_like(n), where=norm > 0)
    flip = np.sum(n * dirs, axis=-1) > 0
    n[flip] *= -1.0

    pp = proj.pose.inverse().apply(pts.reshape(-1, 3)).reshape(H, W, 3)
    r = np.linalg.norm(pp, axis=-1)
    front = pp[..., 2] > 0
    inten = np.zeros((H, W))
    az = np.degrees(np.arctan2(pp[..., 0], np.where(front, pp[..., 2], 1.0)))
    el = np.degrees(np.arctan2(pp[..., 1], np.where(front, pp[..., 2], 1.0)))
    inten[front] = sample_intensity(photometry, az[front], el[front])
    to_pt = pts - proj.pose.translation
    to_pt /= np.linalg.norm(to_pt, axis=-1, keepdims=True)
    cos_inc = np.maximum(0.0, -np.sum(n * to_pt, axis=-1))
    E = params.projector_power * proj.power * inten * cos_inc / r**2
    E[~depth.valid] = 0.0
    img = np.clip(params.exposure * albedo * E, 0.0, 1.0) ** (1.0 / params.gamma)
    meta = {"illumination": photometry.base.kind, "cell_deg": photometry.base.cell_deg}
    return RenderedFrame(img, depth, meta, E)


def image_to_png(image: np.ndarray, path, rgb: bool = False):
    """Export an intensity image as 8-bit grayscale (or replicated RGB) PNG."""
    from PIL import Image

    arr = np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    if rgb:
        arr = np.repeat(arr[..., None], 3, axis=-1)
        Image.fromarray(arr, mode="RGB").save(path)
    else:
        Image.fromarray(arr, mode="L").save(path)


def measure_cell_size(frame: RenderedFrame, wall_z: float, cam: CameraIntrinsics,
                      proj: ProjectorModel, max_az_deg: float = 4.0) -> float:
    """Metric side of the projected checkerboard cell on a fronto-parallel wall.

    Scans the central image row for on/off transitions, converts them to
    wall coordinates, and averages the spacing near the projector axis
    (where the tan-angle cell size is constant to well under 1%).
    """
    row = frame.image[int(round(cam.cy)), :]
    lo, hi = float(row.min()), float(row.max())
    if hi - lo < 0.05:
        raise MeasurementError("no pattern transitions found on the scanline")
    thr = (lo + hi) / 2.0
    b = row > thr
    idx = np.nonzero(b[1:] != b[:-1])[0]
    if len(idx) < 3:
        raise MeasurementError("too few pattern transitions to measure a cell")
    # sub-pixel transition positions by linear interpolation
    u = idx + (thr - row[idx]) / (row[idx + 1] - row[idx])
    x_wall = (u - cam.cx) / cam.fx * wall_z
    # keep transitions near the projector's optical axis
    px, _, pz = proj.pose.translation
    az = np.degrees(np.arctan2(x_wall - px, wall_z - pz))
    keep = np.abs(az) <= max_az_deg
    if keep.sum() < 3:
        raise MeasurementError("too few transitions near the projector axis")
    xs = np.sort(x_wall[keep])
    return float((xs[-1] - xs[0]) / (len(xs) - 1))
