"""Secondary acceptance: directional training claims at desk scale.

These train many models on a 2,000-frame dataset and take from tens of
minutes (GPU) to hours (CPU); they are marked slow. Run with:

    pytest tests/test_acceptance.py -m slow -s
"""

import pytest

from ledtrainer.config import TrainConfig
from ledtrainer.experiments import run_experiment

from conftest import run_ledgen

SEEDS = (0, 1, 2, 3, 4)
FRAMES = 2000
EPOCHS = 25


@pytest.fixture(scope="module")
def study_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("study")
    proc = run_ledgen("generate", "--out", str(root), "--count", str(FRAMES),
                      "--seed", "0", "--size", "96", "--kinds", "led,hb")
    assert proc.returncode == 0, proc.stderr
    return root / "manifest.json"


def _cfg(seed):
    return TrainConfig(input_size=96, epochs=EPOCHS, batch_size=32, seed=seed)


def _rmse(rows, **match):
    for row in rows:
        if all(row.get(k) == v for k, v in match.items()):
            return row["report"]["rmse"]
    raise AssertionError(f"no row matching {match}")


@pytest.mark.slow
def test_directional_led_claim(study_dataset, tmp_path):
    wins = 0
    gaps = []
    for seed in SEEDS:
        table = run_experiment("led_vs_hb", study_dataset, _cfg(seed),
                               tmp_path / f"seed{seed}")
        led = _rmse(table["rows"], train="led")
        hb = _rmse(table["rows"], train="hb")
        gaps.append((hb - led) / hb)
        wins += led < hb
        print(f"seed {seed}: LED RMSE {led:.3f} vs HB {hb:.3f} "
              f"({100 * (hb - led) / hb:+.1f}%)")
    print(f"[{'PASS' if wins >= 4 else 'FAIL'}] directional LED claim: "
          f"{wins}/5 seeds, mean improvement {100 * sum(gaps) / len(gaps):+.1f}%")
    assert wins >= 4


@pytest.mark.slow
def test_cross_domain_asymmetry(study_dataset, tmp_path):
    wins = 0
    for seed in SEEDS:
        table = run_experiment("cross_domain", study_dataset, _cfg(seed),
                               tmp_path / f"seed{seed}")
        hb_on_led = _rmse(table["rows"], train="hb", test="led")
        led_on_hb = _rmse(table["rows"], train="led", test="hb")
        wins += hb_on_led > led_on_hb
        print(f"seed {seed}: HB->LED {hb_on_led:.3f} vs LED->HB {led_on_hb:.3f}")
    print(f"[{'PASS' if wins > len(SEEDS) // 2 else 'FAIL'}] "
          f"cross-domain asymmetry: {wins}/{len(SEEDS)} seeds")
    assert wins > len(SEEDS) // 2


@pytest.mark.slow
def test_data_efficiency(study_dataset, tmp_path):
    from ledtrainer.experiments import _arm

    wins = 0
    for seed in SEEDS:
        out = tmp_path / f"seed{seed}"
        led_half = _arm(study_dataset, _cfg(seed), out / "led_half",
                        "led", "led", fraction=0.5)["rmse"]
        hb_full = _arm(study_dataset, _cfg(seed), out / "hb_full",
                       "hb", "hb")["rmse"]
        wins += led_half <= hb_full
        print(f"seed {seed}: LED@50% {led_half:.3f} vs HB@100% {hb_full:.3f}")
    print(f"[{'PASS' if wins > len(SEEDS) // 2 else 'FAIL'}] "
          f"data efficiency: {wins}/{len(SEEDS)} seeds")
    assert wins > len(SEEDS) // 2
