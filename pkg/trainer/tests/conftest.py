import json
import subprocess
import sys

import numpy as np
import pytest


def run_ledgen(*args):
    """Invoke the dataset generator CLI in a subprocess."""
    proc = subprocess.run([sys.executable, "-m", "ledgen.cli", *args],
                          capture_output=True, text=True)
    return proc


@pytest.fixture(scope="session")
def desk_dataset(tmp_path_factory):
    """12 frames at 96x96: 8 train / 2 val / 2 test ids, led+hb pairs."""
    root = tmp_path_factory.mktemp("desk")
    proc = run_ledgen("generate", "--out", str(root), "--count", "12",
                      "--seed", "0", "--size", "96", "--kinds", "led,hb")
    assert proc.returncode == 0, proc.stderr
    return root


@pytest.fixture(scope="session")
def wall_dataset(tmp_path_factory):
    """8 fronto-parallel wall scenes (5-40 m): smooth constant-depth
    targets whose projected pattern spacing encodes the distance.

    The manifest is assembled by hand from the generator's `project`
    renders, exercising the same on-disk contract as generated data.
    """
    from ledtrainer.data import write_pfm

    root = tmp_path_factory.mktemp("walls")
    distances = [5.0, 8.0, 12.0, 17.0, 23.0, 29.0, 35.0, 40.0]
    entries = []
    for i, z in enumerate(distances):
        image_path = f"{i:06d}_led.png"
        depth_path = f"{i:06d}.pfm"
        proc = run_ledgen("project", "--wall", str(z), "--size", "96",
                          "--out", str(root / image_path))
        assert proc.returncode == 0, proc.stderr
        write_pfm(root / depth_path, np.full((96, 96), z))
        entries.append({"id": i, "image_path": image_path,
                        "depth_path": depth_path, "illumination": "led",
                        "cell_deg": 0.5, "seed": i, "map_id": 0,
                        "split": "train"})
    with open(root / "manifest.json", "w") as f:
        json.dump({"version": 1, "rig": "walls", "entries": entries}, f)
    return root
