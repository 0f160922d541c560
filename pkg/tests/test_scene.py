import numpy as np
import pytest
from scipy.stats import kstest

from ledgen.errors import ContractError, GenerationError
from ledgen.geometry import CameraIntrinsics, Pose, camera_ray_directions
from ledgen.primitives import Box, GroundPlane, Sphere, Wall
from ledgen.scene import (
    DepthMap,
    Scene,
    SceneConfig,
    clip_depth,
    generate_scene,
    raycast_depth,
)

from conftest import brute_force_nearest


class TestGenerateScene:
    def test_determinism(self):
        a = generate_scene(0)
        b = generate_scene(0)
        assert a.primitives == b.primitives
        assert a.ambient_lux == b.ambient_lux
        assert a.interferers == b.interferers

    def test_zero_entities_ground_only(self):
        cfg = SceneConfig(n_entities=(0, 0), n_interferers=(0, 0))
        s = generate_scene(5, cfg)
        assert len(s.primitives) == 1
        assert isinstance(s.primitives[0], GroundPlane)

    def test_always_contains_ground(self):
        for seed in range(20):
            s = generate_scene(seed)
            assert isinstance(s.primitives[0], GroundPlane)

    def test_entity_count_in_range(self):
        cfg = SceneConfig(n_entities=(2, 4))
        for seed in range(20):
            s = generate_scene(seed, cfg)
            # each entity contributes 1-2 primitives after the ground plane
            extra = len(s.primitives) - 1
            assert 2 <= extra <= 8

    def test_ambient_uniform_0_10(self):
        vals = [generate_scene(seed).ambient_lux for seed in range(1000)]
        assert 0 <= min(vals) and max(vals) <= 10
        assert kstest(np.array(vals) / 10.0, "uniform").pvalue > 0.01

    def test_map_id_changes_content(self):
        assert generate_scene(0, map_id=0).primitives != generate_scene(0, map_id=4).primitives

    def test_impossible_placement_errors(self):
        cfg = SceneConfig(n_entities=(30, 30), z_range=(5.0, 5.5), x_range=(-1.0, 1.0),
                          entity_kinds=("car",))
        with pytest.raises(GenerationError):
            generate_scene(0, cfg)

    def test_config_json_round_trip(self):
        cfg = SceneConfig(n_entities=(1, 3), z_range=(5, 50))
        assert SceneConfig.from_json(cfg.to_json()) == cfg


def _cam(n=64):
    return CameraIntrinsics.from_hfov(50.0, n, n)


class TestRaycastDepth:
    def test_ground_plane_closed_form(self):
        cam = _cam(65)
        h = 1.4
        rc = raycast_depth(Scene((GroundPlane(),), 0.0), cam,
                           Pose.from_translation((0, h, 0)))
        dirs = camera_ray_directions(cam)
        for (i, j) in [(50, 32), (60, 10), (40, 55)]:
            d = dirs[i, j]
            if d[1] >= 0:
                assert not rc.depth.valid[i, j]
            else:
                t = h / -d[1]
                assert rc.depth.values[i, j] == pytest.approx(t * d[2], abs=1e-9)
        # horizon row and above: invalid
        assert not rc.depth.valid[: 32, :].any()

    def test_fronto_parallel_wall(self):
        cam = _cam()
        wall = Wall("z", 10.0, (-50, 50), (-50, 50))
        rc = raycast_depth(Scene((wall,), 0.0), cam)
        assert np.all(rc.depth.valid)
        np.testing.assert_allclose(rc.depth.values, 10.0, atol=1e-9)
        np.testing.assert_allclose(rc.normals, np.broadcast_to([0, 0, -1.0], rc.normals.shape), atol=1e-12)

    def test_random_scenes_match_oracle(self):
        cam = _cam(32)
        rng = np.random.default_rng(7)
        dirs = camera_ray_directions(cam)
        for seed in range(10):
            scene = generate_scene(seed, SceneConfig(n_entities=(1, 4)))
            pose = Pose.from_translation((0, 1.4, 0))
            rc = raycast_depth(scene, cam, pose)
            for _ in range(40):
                i = rng.integers(0, 32)
                j = rng.integers(0, 32)
                t = brute_force_nearest(scene.primitives, (0, 1.4, 0), dirs[i, j])
                if np.isinf(t):
                    assert not rc.depth.valid[i, j]
                else:
                    assert rc.depth.values[i, j] == pytest.approx(t * dirs[i, j][2], rel=1e-12)

    def test_normals_front_facing_unit(self):
        cam = _cam()
        scene = generate_scene(3)
        rc = raycast_depth(scene, cam, Pose.from_translation((0, 1.4, 0)))
        v = rc.depth.valid
        n = rc.normals[v]
        np.testing.assert_allclose(np.linalg.norm(n, axis=-1), 1.0, atol=1e-9)
        dirs = camera_ray_directions(cam)[v]
        assert np.all(np.sum(n * dirs, axis=-1) < 1e-9)

    def test_normals_agree_with_finite_differences(self):
        # smooth region: ground plane seen from above
        cam = _cam(65)
        rc = raycast_depth(Scene((GroundPlane(),), 0.0), cam,
                           Pose.from_translation((0, 1.4, 0)))
        v = rc.depth.valid
        rows = np.nonzero(v.all(axis=1))[0][2:-2]
        pts = rc.points
        for i in rows[::3]:
            for j in range(5, 60, 7):
                dx = pts[i, j + 1] - pts[i, j - 1]
                dy = pts[i + 1, j] - pts[i - 1, j]
                n = np.cross(dy, dx)
                n /= np.linalg.norm(n)
                if n[1] < 0:
                    n = -n
                ang = np.degrees(np.arccos(np.clip(np.dot(n, rc.normals[i, j]), -1, 1)))
                assert ang < 2.0

    def test_determinism_bit_identical(self):
        cam = _cam()
        scene = generate_scene(11)
        pose = Pose.from_translation((0, 1.4, 0))
        a = raycast_depth(scene, cam, pose)
        b = raycast_depth(scene, cam, pose)
        assert np.array_equal(a.depth.values, b.depth.values)


class TestClipDepth:
    def test_clips_at_default(self):
        d = DepthMap(np.array([[150.0, 42.0]]), np.array([[True, True]]))
        c = clip_depth(d)
        assert c.values[0, 0] == 100.0
        assert c.values[0, 1] == 42.0
        assert c.valid.all()

    def test_all_invalid_unchanged_mask(self):
        d = DepthMap(np.full((2, 2), np.inf), np.zeros((2, 2), dtype=bool))
        c = clip_depth(d)
        assert not c.valid.any()

    def test_bad_max_depth(self):
        d = DepthMap(np.ones((1, 1)), np.ones((1, 1), dtype=bool))
        with pytest.raises(ContractError):
            clip_depth(d, 0.0)
