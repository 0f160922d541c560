import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ledgen.errors import ContractError
from ledgen.geometry import ProjectorModel
from ledgen.patterns import (
    apply_photometry,
    cell_contrast,
    control_to_png,
    identity_photometry,
    make_pattern,
    sample_intensity,
)


class TestMakePattern:
    def test_high_beam_all_on(self, default_proj):
        p = make_pattern("high_beam", proj=default_proj)
        assert p.control.size == 3696
        assert np.all(p.control == 1.0)

    def test_checkerboard_parity(self, default_proj):
        p = make_pattern("checkerboard", 0.5, default_proj)
        assert p.sample(0.1, 0.1) == 1.0
        assert p.sample(0.6, 0.1) == 0.0

    def test_corner_pixel_on(self, default_proj):
        # pixel (0,0): az=-17.367, el=-3.375 -> floor sum -35 + -7 even -> on
        p = make_pattern("checkerboard", 0.5, default_proj)
        assert p.control[0, 0] == 1.0

    def test_mean_intensity_near_half(self, default_proj):
        p = make_pattern("checkerboard", 0.5, default_proj)
        assert 0.45 <= p.control.mean() <= 0.55

    def test_lines_key_on_single_axis(self, default_proj):
        vl = make_pattern("vlines", 0.5, default_proj)
        hl = make_pattern("hlines", 0.5, default_proj)
        assert vl.sample(0.1, 0.1) == vl.sample(0.1, 0.7)
        assert hl.sample(0.1, 0.1) == hl.sample(0.7, 0.1)
        assert vl.sample(0.1, 0.1) != vl.sample(0.7, 0.1)

    def test_cell_below_pitch_rejected(self, default_proj):
        with pytest.raises(ContractError, match="minimum cell"):
            make_pattern("checkerboard", 0.2, default_proj)

    def test_fine_cell_on_fine_grid(self):
        proj = ProjectorModel(cols=528, rows=112)
        p = make_pattern("checkerboard", 0.125, proj)
        assert 0.45 <= p.control.mean() <= 0.55

    def test_phase_flip_complements(self, default_proj):
        a = make_pattern("checkerboard", 0.5, default_proj, phase=True)
        b = make_pattern("checkerboard", 0.5, default_proj, phase=False)
        np.testing.assert_allclose(a.control + b.control, 1.0)


class TestPhotometry:
    def test_identity_matches_pattern(self, default_proj):
        p = make_pattern("checkerboard", 0.5, default_proj)
        ph = identity_photometry(p)
        assert sample_intensity(ph, 0.1, 0.1) == 1.0
        assert sample_intensity(ph, 0.6, 0.1) == 0.0

    def test_zero_outside_frustum(self, default_proj):
        ph = apply_photometry(make_pattern("high_beam", proj=default_proj))
        assert sample_intensity(ph, 18.0, 0.0) == 0.0
        assert sample_intensity(ph, 0.0, 3.6) == 0.0

    def test_vignette_closed_form(self, default_proj):
        ph = apply_photometry(make_pattern("high_beam", proj=default_proj),
                              psf_sigma0_deg=0, psf_sigma_slope=0, vignette_exponent=4)
        ratio = sample_intensity(ph, 17.499, 0.0) / sample_intensity(ph, 0.0, 0.0)
        assert ratio == pytest.approx(np.cos(np.radians(17.499)) ** 4, rel=1e-6)

    def test_values_clamped(self, default_proj):
        ph = apply_photometry(make_pattern("checkerboard", 0.5, default_proj))
        rng = np.random.default_rng(0)
        az = rng.uniform(-20, 20, 500)
        el = rng.uniform(-5, 5, 500)
        v = sample_intensity(ph, az, el)
        assert np.all(v >= 0) and np.all(v <= 1)

    def test_edge_contrast_degrades(self, default_proj):
        # central cells crisper than edge cells, as the lens model intends
        ph = apply_photometry(make_pattern("checkerboard", 0.5, default_proj))
        assert cell_contrast(ph, 0.0, 0.0) > cell_contrast(ph, 16.0, 0.0)

    def test_contrast_monotone_in_field_angle(self, default_proj):
        ph = apply_photometry(make_pattern("checkerboard", 0.5, default_proj))
        contrasts = [cell_contrast(ph, az, 0.0) for az in np.linspace(0, 16, 9)]
        assert all(a >= b - 1e-9 for a, b in zip(contrasts, contrasts[1:]))

    def test_energy_ordering(self, default_proj):
        az = np.linspace(-17.4, 17.4, 400)
        el = np.linspace(-3.4, 3.4, 80)
        A, E = np.meshgrid(az, el)
        hb = apply_photometry(make_pattern("high_beam", proj=default_proj))
        total_hb = sample_intensity(hb, A, E).sum()
        for kind in ("checkerboard", "vlines", "hlines"):
            ph = apply_photometry(make_pattern(kind, 0.5, default_proj))
            assert total_hb >= sample_intensity(ph, A, E).sum()

    def test_duty_cycle_half(self, default_proj):
        p = make_pattern("checkerboard", 0.5, default_proj)
        az = np.linspace(-17.49, 17.49, 1400)
        el = np.linspace(-3.49, 3.49, 280)
        A, E = np.meshgrid(az, el)
        frac = p.sample(A, E).mean()
        assert abs(frac - 0.5) <= 0.02

    def test_blur_reduces_to_smooth_transition(self, default_proj):
        p = make_pattern("checkerboard", 0.5, default_proj)
        # blurred value at a cell border is exactly half way
        assert p.sample(0.5, 0.25, sigma_deg=0.1) == pytest.approx(0.5, abs=1e-9)

    def test_control_png_export(self, default_proj, tmp_path):
        from PIL import Image

        p = make_pattern("checkerboard", 0.5, default_proj)
        path = tmp_path / "control.png"
        control_to_png(p, path)
        with Image.open(path) as img:
            assert img.size == (132, 28)
            arr = np.asarray(img)
        assert set(np.unique(arr)) == {0, 255}


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([0.5, 0.25, 0.125]), st.floats(-17, 17), st.floats(-3.4, 3.4))
def test_phase_flip_property(cell, az, el):
    proj = ProjectorModel(cols=1056, rows=224)
    a = make_pattern("checkerboard", cell, proj, phase=True)
    b = make_pattern("checkerboard", cell, proj, phase=False)
    assert a.sample(az, el) + b.sample(az, el) == pytest.approx(1.0)
