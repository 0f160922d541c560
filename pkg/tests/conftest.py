import numpy as np
import pytest

from ledgen.geometry import CameraIntrinsics, Pose, ProjectorModel
from ledgen.primitives import Box, GroundPlane, Sphere, Wall


@pytest.fixture
def default_proj():
    return ProjectorModel()


@pytest.fixture
def zero_baseline_proj():
    return ProjectorModel(pose=Pose.identity())


@pytest.fixture
def cam_320():
    return CameraIntrinsics.from_hfov(50.0, 320, 320)


def brute_force_nearest(primitives, origin, direction):
    """Independent scalar nearest-hit oracle (no shared code path)."""
    import math

    ox, oy, oz = origin
    dx, dy, dz = direction
    best = math.inf
    for p in primitives:
        if isinstance(p, GroundPlane):
            if abs(dy) > 1e-12:
                t = -oy / dy
                if t > 1e-12:
                    best = min(best, t)
        elif isinstance(p, Sphere):
            cx, cy, cz = p.center
            ocx, ocy, ocz = ox - cx, oy - cy, oz - cz
            a = dx * dx + dy * dy + dz * dz
            b = 2 * (dx * ocx + dy * ocy + dz * ocz)
            c = ocx**2 + ocy**2 + ocz**2 - p.radius**2
            disc = b * b - 4 * a * c
            if disc >= 0:
                sq = math.sqrt(disc)
                for t in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)):
                    if t > 1e-12:
                        best = min(best, t)
                        break
        elif isinstance(p, Box):
            tmin, tmax = -math.inf, math.inf
            ok = True
            for o, d, lo, hi in ((ox, dx, p.lo[0], p.hi[0]),
                                 (oy, dy, p.lo[1], p.hi[1]),
                                 (oz, dz, p.lo[2], p.hi[2])):
                if abs(d) < 1e-15:
                    if o < lo or o > hi:
                        ok = False
                        break
                else:
                    t0, t1 = (lo - o) / d, (hi - o) / d
                    if t0 > t1:
                        t0, t1 = t1, t0
                    tmin, tmax = max(tmin, t0), min(tmax, t1)
            if ok and tmin <= tmax and tmax > 1e-12:
                t = tmin if tmin > 1e-12 else tmax
                best = min(best, t)
        elif isinstance(p, Wall):
            if p.axis == "z":
                o_k, d_k, o_o, d_o = oz, dz, ox, dx
            else:
                o_k, d_k, o_o, d_o = ox, dx, oz, dz
            if abs(d_k) > 1e-12:
                t = (p.offset - o_k) / d_k
                po = o_o + t * d_o
                py = oy + t * dy
                if (t > 1e-12 and p.span[0] <= po <= p.span[1]
                        and p.y_span[0] <= py <= p.y_span[1]):
                    best = min(best, t)
    return best
