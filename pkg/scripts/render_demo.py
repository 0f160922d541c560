#!/usr/bin/env python3
"""Render a small gallery: control matrix, photometry, wall projections
at several distances, and one procedural scene under both illuminations.

Usage: python3 scripts/render_demo.py --out demo_out
"""

import argparse
from pathlib import Path

import numpy as np

from ledgen.dataset import default_rig
from ledgen.geometry import render_shadow_map
from ledgen.patterns import apply_photometry, control_to_png, make_pattern, photometry_to_png
from ledgen.render import image_to_png, shade, shade_depth_map
from ledgen.scene import DepthMap, generate_scene, raycast_depth


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="demo_out")
    ap.add_argument("--size", type=int, default=320)
    ap.add_argument("--cell", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cam, cam_pose, proj = default_rig(args.size)

    pattern = make_pattern("checkerboard", args.cell, proj)
    ph = apply_photometry(pattern)
    control_to_png(pattern, out / "control.png")
    photometry_to_png(ph, out / "photometry.png")

    for z in (10.0, 30.0, 100.0):
        vals = np.full((cam.height, cam.width), z)
        dm = DepthMap(vals, np.ones_like(vals, dtype=bool))
        frame = shade_depth_map(dm, cam, proj, ph)
        image_to_png(frame.image, out / f"wall_{z:g}m.png")

    scene = generate_scene(args.seed)
    rc = raycast_depth(scene, cam, cam_pose)
    shadow = render_shadow_map(scene, proj, cam_pose)
    for kind, name in (("checkerboard", "scene_led"), ("high_beam", "scene_hb")):
        p = apply_photometry(make_pattern(kind, args.cell, proj))
        frame = shade(rc, scene, cam, proj, p, cam_pose=cam_pose, shadow=shadow)
        image_to_png(frame.image, out / f"{name}.png")
    print(f"wrote gallery to {out}/")


if __name__ == "__main__":
    main()
