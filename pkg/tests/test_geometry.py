import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ledgen.errors import ContractError
from ledgen.geometry import (
    CameraIntrinsics,
    Pose,
    ProjectorModel,
    angles_in_projector,
    is_lit,
    project,
    projector_pixel_direction,
    render_shadow_map,
    unproject,
)
from ledgen.primitives import Box, Wall
from ledgen.scene import Scene

from conftest import brute_force_nearest


class TestCamera:
    def test_principal_point_is_optical_axis(self):
        cam = CameraIntrinsics(123.0, 456.0, 40.0, 30.0, 100, 80)
        np.testing.assert_allclose(unproject((40.0, 30.0), 10.0, cam), [0, 0, 10])

    def test_unproject_known_offset(self):
        cam = CameraIntrinsics(100, 100, 50, 50, 101, 101)
        np.testing.assert_allclose(unproject((150, 50), 10, cam), [10, 0, 10], atol=1e-12)

    def test_v_axis_points_down(self):
        cam = CameraIntrinsics(100, 100, 50, 50, 101, 101)
        # larger v = lower in the image = smaller world y
        p = unproject((50, 80), 10, cam)
        assert p[1] < 0

    def test_round_trip_1000_random(self):
        rng = np.random.default_rng(0)
        cam = CameraIntrinsics(350.0, 340.0, 160.0, 120.0, 320, 240)
        px = rng.uniform([0, 0], [320, 240], size=(1000, 2))
        depth = rng.uniform(0.1, 100, size=1000)
        back = project(unproject(px, depth, cam), cam)
        assert np.max(np.abs(back - px)) < 1e-9

    def test_nonpositive_depth_rejected(self):
        cam = CameraIntrinsics(100, 100, 50, 50, 101, 101)
        with pytest.raises(ContractError):
            unproject((10, 10), 0.0, cam)

    def test_invalid_intrinsics_rejected(self):
        with pytest.raises(ContractError):
            CameraIntrinsics(-1, 100, 50, 50, 101, 101)
        with pytest.raises(ContractError):
            CameraIntrinsics(100, 100, 200, 50, 101, 101)


class TestPose:
    def test_compose_inverse_is_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            if np.linalg.det(q) < 0:
                q[:, 0] *= -1
            pose = Pose(q, rng.normal(size=3))
            ident = pose.compose(pose.inverse())
            np.testing.assert_allclose(ident.rotation, np.eye(3), atol=1e-9)
            np.testing.assert_allclose(ident.translation, 0, atol=1e-9)

    def test_rejects_non_rotation(self):
        with pytest.raises(ContractError):
            Pose(np.eye(3) * 2, np.zeros(3))


class TestProjectorModel:
    def test_default_pixel_count(self, default_proj):
        assert default_proj.cols * default_proj.rows == 3696

    def test_angular_pitch(self, default_proj):
        assert default_proj.hpitch_deg == pytest.approx(35.0 / 132)
        assert default_proj.vpitch_deg == pytest.approx(0.25)

    def test_center_symmetry(self, default_proj):
        az65, _ = default_proj.pixel_angles(65, 0)
        az66, _ = default_proj.pixel_angles(66, 0)
        assert az65 == pytest.approx(-az66)

    def test_corner_pixels(self, default_proj):
        az, el = default_proj.pixel_angles(0, 0)
        assert az == pytest.approx(-17.5 + 35.0 / 132 / 2)
        assert el == pytest.approx(-3.5 + 0.125)
        az2, el2 = default_proj.pixel_angles(131, 27)
        assert az2 == pytest.approx(-az)
        assert el2 == pytest.approx(-el)

    def test_directions_unit_and_in_frustum(self, default_proj):
        c, r = np.meshgrid(np.arange(132), np.arange(28))
        d = projector_pixel_direction(c, r, default_proj)
        np.testing.assert_allclose(np.linalg.norm(d, axis=-1), 1.0, atol=1e-12)
        az = np.degrees(np.arctan2(d[..., 0], d[..., 2]))
        el = np.degrees(np.arctan2(d[..., 1], d[..., 2]))
        assert np.all(np.abs(az) <= 17.5)
        assert np.all(np.abs(el) <= 3.5)

    def test_out_of_range_pixel(self, default_proj):
        with pytest.raises(ContractError):
            projector_pixel_direction(132, 0, default_proj)


class TestAnglesInProjector:
    def test_on_axis(self):
        assert angles_in_projector((0, 0, 5)) == (0.0, 0.0)

    def test_45_degrees(self):
        az, el = angles_in_projector((1, 0, 1))
        assert az == pytest.approx(45.0)
        assert el == 0.0

    def test_tan_10_degrees(self):
        az, _ = angles_in_projector((0.17632698, 0, 1))
        assert az == pytest.approx(10.0, abs=1e-6)

    def test_behind_projector(self):
        with pytest.raises(ContractError):
            angles_in_projector((0, 0, -1))

    def test_inverse_of_pixel_direction(self, default_proj):
        rng = np.random.default_rng(2)
        c = rng.integers(0, 132, size=50)
        r = rng.integers(0, 28, size=50)
        d = projector_pixel_direction(c, r, default_proj)
        az, el = angles_in_projector(d)
        az_exp, el_exp = default_proj.pixel_angles(c, r)
        np.testing.assert_allclose(az, az_exp, atol=1e-9)
        np.testing.assert_allclose(el, el_exp, atol=1e-9)


def _scene(prims):
    return Scene(tuple(prims), ambient_lux=0.0)


class TestShadowMap:
    def test_empty_scene_all_infinite(self, zero_baseline_proj):
        sm = render_shadow_map(_scene([]), zero_baseline_proj)
        assert np.all(np.isinf(sm.grid))

    def test_wall_ranges(self, zero_baseline_proj):
        wall = Wall("z", 10.0, (-50, 50), (-50, 50))
        sm = render_shadow_map(_scene([wall]), zero_baseline_proj)
        sh, sw = sm.grid.shape
        assert (sh, sw) == (28 * 4, 132 * 4)
        # center texels: smallest angle to the axis
        center = sm.grid[sh // 2 - 1 : sh // 2 + 1, sw // 2 - 1 : sw // 2 + 1]
        assert np.min(np.abs(center - 10.0)) < 1e-3
        # every texel equals 10 / cos(angle between ray and axis)
        assert np.all(sm.grid >= 10.0 - 1e-9)

    def test_box_before_wall_matches_oracle(self, zero_baseline_proj):
        prims = [
            Wall("z", 20.0, (-50, 50), (-50, 50)),
            Box((-1, -1, 9.5), (1, 1, 10.5)),
        ]
        sm = render_shadow_map(_scene(prims), zero_baseline_proj)
        sh, sw = sm.grid.shape
        rng = np.random.default_rng(3)
        for _ in range(300):
            i = rng.integers(0, sh)
            j = rng.integers(0, sw)
            az = np.radians(((j + 0.5) / sw - 0.5) * 35.0)
            el = np.radians(((i + 0.5) / sh - 0.5) * 7.0)
            d = np.array([np.tan(az), np.tan(el), 1.0])
            d /= np.linalg.norm(d)
            expect = brute_force_nearest(prims, (0.0, 0.0, 0.0), d)
            assert sm.grid[i, j] == pytest.approx(expect, rel=1e-9)


class TestIsLit:
    def test_point_behind_projector(self, zero_baseline_proj):
        sm = render_shadow_map(_scene([]), zero_baseline_proj)
        assert not is_lit(np.array([0.0, 0.0, -1.0]), zero_baseline_proj, sm)

    def test_wall_point_lit_box_shadow_unlit(self, zero_baseline_proj):
        prims = [
            Wall("z", 20.0, (-50, 50), (-50, 50)),
            Box((-1, -0.5, 9.5), (1, 0.5, 10.5)),
        ]
        sm = render_shadow_map(_scene(prims), zero_baseline_proj)
        # far off-axis wall point, unoccluded
        assert is_lit(np.array([4.0, 0.8, 20.0]), zero_baseline_proj, sm)
        # directly behind the box center
        assert not is_lit(np.array([0.0, 0.0, 20.0]), zero_baseline_proj, sm)

    def test_oracle_agreement_999(self, default_proj):
        prims = [
            Wall("z", 25.0, (-60, 60), (-60, 60)),
            Box((-2, -1, 9.0), (0, 1, 11.0)),
            Box((3, -2, 14.0), (5, 0, 16.0)),
        ]
        sm = render_shadow_map(_scene(prims), default_proj)
        rng = np.random.default_rng(4)
        pts = np.stack(
            [rng.uniform(-7, 7, 4000), rng.uniform(-2, 2, 4000), np.full(4000, 25.0)],
            axis=-1,
        )
        lit = is_lit(pts, default_proj, sm)
        origin = default_proj.pose.translation
        agree = 0
        near_boundary = 0
        for p, l in zip(pts, lit):
            v = p - origin
            dist = np.linalg.norm(v)
            hit = brute_force_nearest(prims, origin, v / dist)
            az = np.degrees(np.arctan2(v[0], v[2]))
            el = np.degrees(np.arctan2(v[1], v[2]))
            inside = abs(az) <= 17.5 and abs(el) <= 3.5
            expect = inside and hit >= dist - 1e-6
            if l == expect:
                agree += 1
            elif inside and abs(hit - dist) < 5 * sm.bias:
                near_boundary += 1
        assert (agree + near_boundary) / len(pts) >= 0.999

    def test_zero_baseline_no_self_shadowing(self, zero_baseline_proj):
        # camera-visible points on smooth geometry are always lit
        prims = [Wall("z", 15.0, (-60, 60), (-60, 60))]
        sm = render_shadow_map(_scene(prims), zero_baseline_proj)
        rng = np.random.default_rng(5)
        az = rng.uniform(-17.4, 17.4, 2000)
        el = rng.uniform(-3.4, 3.4, 2000)
        pts = np.stack(
            [15.0 * np.tan(np.radians(az)), 15.0 * np.tan(np.radians(el)), np.full(2000, 15.0)],
            axis=-1,
        )
        assert np.all(is_lit(pts, zero_baseline_proj, sm))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 300), st.floats(5, 315), st.floats(5, 235))
def test_round_trip_property(depth, u, v):
    cam = CameraIntrinsics(400.0, 410.0, 160.0, 120.0, 320, 240)
    back = project(unproject((u, v), depth, cam), cam)
    assert abs(back[0] - u) < 1e-9 and abs(back[1] - v) < 1e-9
