"""Procedural nighttime road scenes with exact ray-cast depth and normals.

Scenes are lists of analytic primitives (ground plane, boxes standing in
for cars, stacked shapes for pedestrians, spheres, wall segments) plus a
light environment: ambient level in lux and interfering point lights.
Generation is a pure function of (seed, config, map_id); per-purpose RNG
streams keep parallel generation order-independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ContractError, GenerationError
from .geometry import CameraIntrinsics, Pose, camera_ray_directions
from .primitives import Box, GroundPlane, Sphere, Wall, cast_rays

DEFAULT_MAX_DEPTH = 100.0


@dataclass(frozen=True)
class PointLight:
    position: tuple  # meters, world frame
    power: float  # radiant scale, same arbitrary units as ProjectorModel.power


@dataclass(frozen=True)
class Scene:
    primitives: tuple
    ambient_lux: float
    interferers: tuple = ()
    seed: int = 0
    map_id: int = 0

    def __post_init__(self):
        if not (0.0 <= self.ambient_lux <= 10.0):
            raise ContractError(f"ambient_lux must be in [0, 10], got {self.ambient_lux}")


@dataclass
class SceneConfig:
    """Ranges driving procedural generation; serializable as JSON."""

    n_entities: tuple = (2, 6)
    z_range: tuple = (5.0, 100.0)  # log-uniform entity distance
    x_range: tuple = (-10.0, 10.0)
    albedo_range: tuple = (0.2, 0.8)
    ground_albedo: float = 0.3
    n_interferers: tuple = (0, 2)
    interferer_power: tuple = (1.0, 20.0)
    ambient_range: tuple = (0.0, 10.0)
    entity_kinds: tuple = ("car", "pedestrian", "sphere", "wall")

    def __post_init__(self):
        if self.z_range[0] < 3.0 or self.z_range[1] > 120.0 or self.z_range[0] >= self.z_range[1]:
            raise ContractError("z_range must be a non-empty subrange of [3, 120] m")
        if self.n_entities[0] > self.n_entities[1] or self.n_entities[0] < 0:
            raise ContractError("invalid entity count range")
        lo, hi = self.ambient_range
        if not (0.0 <= lo <= hi <= 10.0):
            raise ContractError("ambient_range must lie within [0, 10] lux")

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(text):
        d = json.loads(text)
        return SceneConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})


def _rng(seed, map_id, purpose):
    tag = int.from_bytes(purpose.encode(), "little") % (2**32)
    return np.random.default_rng(np.random.SeedSequence([int(seed) % 2**63, int(map_id), tag]))


def _footprint(prim):
    """(x, z, radius) of an entity's ground footprint, for overlap rejection."""
    if isinstance(prim, Box):
        cx = (prim.lo[0] + prim.hi[0]) / 2
        cz = (prim.lo[2] + prim.hi[2]) / 2
        r = max(prim.hi[0] - prim.lo[0], prim.hi[2] - prim.lo[2]) / 2
        return cx, cz, r
    if isinstance(prim, Sphere):
        return prim.center[0], prim.center[2], prim.radius
    if isinstance(prim, Wall):
        if prim.axis == "z":
            return (prim.span[0] + prim.span[1]) / 2, prim.offset, (prim.span[1] - prim.span[0]) / 2
        return prim.offset, (prim.span[0] + prim.span[1]) / 2, (prim.span[1] - prim.span[0]) / 2
    return 0.0, 0.0, 0.0


def _make_entity(kind, x, z, albedo, rng):
    if kind == "car":
        w = rng.uniform(1.6, 2.2)
        h = rng.uniform(1.2, 1.8)
        d = rng.uniform(3.0, 5.0)
        return [Box((x - w / 2, 0.0, z - d / 2), (x + w / 2, h, z + d / 2), albedo)]
    if kind == "pedestrian":
        w = rng.uniform(0.35, 0.55)
        h = rng.uniform(1.5, 1.9)
        torso = Box((x - w / 2, 0.0, z - w / 2), (x + w / 2, h - w, z + w / 2), albedo)
        head = Sphere((x, h - w / 2, z), w / 2, albedo)
        return [torso, head]
    if kind == "sphere":
        r = rng.uniform(0.3, 1.0)
        return [Sphere((x, r, z), r, albedo)]
    if kind == "wall":
        half = rng.uniform(1.5, 4.0)
        h = rng.uniform(1.5, 3.0)
        return [Wall("z", z, (x - half, x + half), (0.0, h), albedo)]
    raise ContractError(f"unknown entity kind {kind!r}")


def generate_scene(seed, config: SceneConfig | None = None, map_id: int = 0) -> Scene:
    """Deterministic scene for (seed, config, map_id); always has a ground plane."""
    config = config or SceneConfig()
    rng = _rng(seed, map_id, "entities")
    primitives = [GroundPlane(config.ground_albedo)]
    footprints = []
    n = int(rng.integers(config.n_entities[0], config.n_entities[1] + 1))
    for _ in range(n):
        for attempt in range(1000):
            kind = config.entity_kinds[rng.integers(0, len(config.entity_kinds))]
            z = float(np.exp(rng.uniform(np.log(config.z_range[0]), np.log(config.z_range[1]))))
            x = float(rng.uniform(*config.x_range))
            albedo = float(rng.uniform(*config.albedo_range))
            parts = _make_entity(kind, x, z, albedo, rng)
            fx, fz, fr = _footprint(parts[0])
            if all((fx - ox) ** 2 + (fz - oz) ** 2 > (fr + orr) ** 2
                   for ox, oz, orr in footprints):
                primitives.extend(parts)
                footprints.append((fx, fz, fr))
                break
        else:
            raise GenerationError(
                f"could not place entity {len(footprints) + 1}/{n} after 1000 attempts"
            )
    arng = _rng(seed, map_id, "ambient")
    ambient = float(arng.uniform(*config.ambient_range))
    irng = _rng(seed, map_id, "interferers")
    lights = []
    for _ in range(int(irng.integers(config.n_interferers[0], config.n_interferers[1] + 1))):
        pos = (float(irng.uniform(-8, 8)), float(irng.uniform(0.5, 1.0)), float(irng.uniform(10, 80)))
        lights.append(PointLight(pos, float(irng.uniform(*config.interferer_power))))
    return Scene(tuple(primitives), ambient, tuple(lights), int(seed), int(map_id))


@dataclass
class DepthMap:
    """Per-pixel range along the camera z axis; +inf (pre-clip) where no hit."""

    values: np.ndarray  # (H, W) float
    valid: np.ndarray  # (H, W) bool
    max_depth: float = DEFAULT_MAX_DEPTH

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]


def clip_depth(d: DepthMap, max_depth: float = DEFAULT_MAX_DEPTH) -> DepthMap:
    """Clamp values at max_depth; the valid mask is untouched."""
    if max_depth <= 0:
        raise ContractError("max_depth must be positive")
    return DepthMap(np.minimum(d.values, max_depth), d.valid.copy(), max_depth)


@dataclass
class RaycastResult:
    depth: DepthMap
    normals: np.ndarray  # (H, W, 3), unit, front-facing; zeros where invalid
    albedo: np.ndarray  # (H, W)
    points: np.ndarray  # (H, W, 3) hit points, camera frame
    prim_index: np.ndarray  # (H, W) int, -1 where invalid

    def __iter__(self):  # allow depth, normals = raycast_depth(...)
        return iter((self.depth, self.normals))


def raycast_depth(scene: Scene, cam: CameraIntrinsics, cam_pose: Pose | None = None) -> RaycastResult:
    """Exact nearest-hit depth, normals and albedo through every pixel center."""
    cam_pose = cam_pose or Pose.identity()
    if cam_pose.translation[1] + 0.0 < 0:
        raise ContractError("camera must be above the ground plane")
    dirs_cam = camera_ray_directions(cam)
    dirs_world = dirs_cam @ cam_pose.rotation.T
    t, idx = cast_rays(scene.primitives, cam_pose.translation, dirs_world)
    valid = np.isfinite(t)
    t_safe = np.where(valid, t, 0.0)
    pts_world = cam_pose.translation + t_safe[..., None] * dirs_world
    pts_cam = (pts_world - cam_pose.translation) @ cam_pose.rotation
    depth_vals = np.where(valid, pts_cam[..., 2], np.inf)
    normals = np.zeros_like(dirs_world)
    albedo = np.zeros(t.shape)
    for i, prim in enumerate(scene.primitives):
        sel = idx == i
        if not np.any(sel):
            continue
        n = prim.normal_at(pts_world[sel])
        flip = np.sum(n * dirs_world[sel], axis=-1) > 0
        n[flip] *= -1.0
        normals[sel] = n
        albedo[sel] = prim.albedo
    normals_cam = normals @ cam_pose.rotation
    return RaycastResult(
        DepthMap(depth_vals, valid), normals_cam, albedo, pts_cam, idx
    )
