"""Headlight illumination patterns and the lens-aberration photometry model.

Patterns are defined analytically in angular space (azimuth/elevation,
degrees) and rasterized to the projector's native control matrix for
export; rendering always samples the analytic form, so cell sizes finer
than the native grid pitch remain usable with a finer grid model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ContractError, MeasurementError
from .geometry import ProjectorModel, in_frustum

PATTERN_KINDS = ("checkerboard", "hlines", "vlines", "high_beam")

_SQRT2 = float(np.sqrt(2.0))


def _phi(x):
    return 0.5 * (1.0 + erf(x / _SQRT2))


def _square_wave(t, cell):
    """+1 where floor(t/cell) is even, -1 otherwise."""
    return np.where(np.floor(t / cell).astype(np.int64) % 2 == 0, 1.0, -1.0)


def _blurred_square_wave(t, cell, sigma):
    """Square wave of period 2*cell convolved with a Gaussian of std sigma.

    sigma may vary per sample (field-dependent PSF); sigma == 0 falls
    back to the exact wave.
    """
    t = np.asarray(t, dtype=np.float64)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), t.shape)
    out = np.zeros_like(t)
    sharp = sigma <= 0
    if np.any(sharp):
        out[sharp] = _square_wave(t[sharp], cell)
    soft = ~sharp
    if np.any(soft):
        ts = t[soft]
        ss = sigma[soft]
        k0 = np.floor(ts / cell)
        K = int(np.ceil(6.0 * float(ss.max()) / cell)) + 1
        acc = np.zeros_like(ts)
        for j in range(-K, K + 1):
            k = k0 + j
            a = k * cell
            b = (k + 1) * cell
            sign = np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
            acc += sign * (_phi((b - ts) / ss) - _phi((a - ts) / ss))
        out[soft] = acc
    return out


@dataclass(frozen=True)
class Pattern:
    """Analytic illumination pattern plus its native-grid control matrix."""

    kind: str
    cell_deg: float
    phase: bool  # True: cell containing the origin quadrant is "on"
    control: np.ndarray  # (rows, cols), values in [0, 1]
    proj: ProjectorModel

    def sample(self, az_deg, el_deg, sigma_deg=0.0):
        """Pattern value at angles, optionally Gaussian-blurred (no frustum cut)."""
        az = np.asarray(az_deg, dtype=np.float64)
        el = np.asarray(el_deg, dtype=np.float64)
        sign = 1.0 if self.phase else -1.0
        if self.kind == "high_beam":
            return np.ones(np.broadcast(az, el).shape)
        if self.kind == "checkerboard":
            sx = _blurred_square_wave(az, self.cell_deg, sigma_deg)
            sy = _blurred_square_wave(el, self.cell_deg, sigma_deg)
            return 0.5 * (1.0 + sign * sx * sy)
        if self.kind == "vlines":
            return 0.5 * (1.0 + sign * _blurred_square_wave(az, self.cell_deg, sigma_deg))
        if self.kind == "hlines":
            return 0.5 * (1.0 + sign * _blurred_square_wave(el, self.cell_deg, sigma_deg))
        raise ContractError(f"unknown pattern kind {self.kind!r}")


def make_pattern(kind, cell_deg=0.5, proj: ProjectorModel | None = None, phase=True) -> Pattern:
    """Build a pattern and rasterize it to the projector's control matrix."""
    proj = proj or ProjectorModel()
    if kind not in PATTERN_KINDS:
        raise ContractError(f"pattern kind must be one of {PATTERN_KINDS}, got {kind!r}")
    if kind != "high_beam":
        if cell_deg <= 0:
            raise ContractError("cell_deg must be positive")
        if kind == "checkerboard":
            min_cell = max(proj.hpitch_deg, proj.vpitch_deg)
        elif kind == "vlines":
            min_cell = proj.hpitch_deg
        else:
            min_cell = proj.vpitch_deg
        if cell_deg < min_cell:
            raise ContractError(
                f"cell {cell_deg} deg not representable on a {proj.cols}x{proj.rows} grid; "
                f"minimum cell is {min_cell:.6g} deg"
            )
    c, r = np.meshgrid(np.arange(proj.cols), np.arange(proj.rows))
    az, el = proj.pixel_angles(c, r)
    pattern = Pattern(kind, float(cell_deg), bool(phase), np.zeros((proj.rows, proj.cols)), proj)
    control = pattern.sample(az, el)
    return Pattern(kind, float(cell_deg), bool(phase), control, proj)


@dataclass(frozen=True)
class Photometry:
    """Realized angular intensity after the headlight optics.

    The lens model is a field-dependent Gaussian PSF (sigma grows from
    the optical axis to the frustum edge) followed by a cos^n vignette;
    intensity is zero outside the frustum.
    """

    base: Pattern
    psf_sigma0_deg: float = 0.05
    psf_sigma_slope: float = 0.10
    vignette_exponent: float = 4.0

    def __post_init__(self):
        if self.psf_sigma0_deg < 0 or self.psf_sigma_slope < 0:
            raise ContractError("PSF sigmas must be non-negative")
        if self.vignette_exponent < 0:
            raise ContractError("vignette exponent must be non-negative")

    def sigma_at(self, az_deg, el_deg):
        proj = self.base.proj
        field = np.maximum(
            np.abs(az_deg) / (proj.hfov_deg / 2.0),
            np.abs(el_deg) / (proj.vfov_deg / 2.0),
        )
        return self.psf_sigma0_deg + self.psf_sigma_slope * field


def apply_photometry(pattern: Pattern, psf_sigma0_deg=0.05, psf_sigma_slope=0.10,
                     vignette_exponent=4.0) -> Photometry:
    return Photometry(pattern, psf_sigma0_deg, psf_sigma_slope, vignette_exponent)


def identity_photometry(pattern: Pattern) -> Photometry:
    return Photometry(pattern, 0.0, 0.0, 0.0)


def sample_intensity(ph: Photometry, az_deg, el_deg):
    """Intensity I(azimuth, elevation) in [0, 1]; 0 outside the frustum."""
    az = np.asarray(az_deg, dtype=np.float64)
    el = np.asarray(el_deg, dtype=np.float64)
    az, el = np.broadcast_arrays(az, el)
    proj = ph.base.proj
    inside = in_frustum(az, el, proj)
    sigma = ph.sigma_at(az, el)
    value = ph.base.sample(az, el, sigma)
    ta = np.tan(np.radians(az))
    te = np.tan(np.radians(el))
    cos_field = 1.0 / np.sqrt(1.0 + ta * ta + te * te)
    vignette = cos_field**ph.vignette_exponent
    out = np.clip(value * vignette, 0.0, 1.0)
    return np.where(inside, out, 0.0)


def cell_contrast(ph: Photometry, az_deg, el_deg, window_deg=(1.0, 0.5), n=64):
    """max - min of the intensity over a window centered at (az, el)."""
    da = np.linspace(-window_deg[0] / 2, window_deg[0] / 2, n)
    de = np.linspace(-window_deg[1] / 2, window_deg[1] / 2, n)
    A, E = np.meshgrid(az_deg + da, el_deg + de)
    vals = sample_intensity(ph, A, E)
    if vals.size == 0:
        raise MeasurementError("empty contrast window")
    return float(vals.max() - vals.min())


def control_to_png(pattern: Pattern, path):
    """Export the control matrix as 8-bit grayscale PNG (black=0, white=1).

    PNG row 0 is the top of the beam (highest elevation).
    """
    from PIL import Image

    img = np.flipud(np.round(pattern.control * 255.0).astype(np.uint8))
    Image.fromarray(img, mode="L").save(path)


def photometry_to_png(ph: Photometry, path, samples_per_pixel=8):
    """Export the realized photometry, densely sampled over the frustum."""
    from PIL import Image

    proj = ph.base.proj
    w = proj.cols * samples_per_pixel
    h = proj.rows * samples_per_pixel
    az = ((np.arange(w) + 0.5) / w - 0.5) * proj.hfov_deg
    el = ((np.arange(h) + 0.5) / h - 0.5) * proj.vfov_deg
    vals = sample_intensity(ph, az[None, :], el[:, None])
    img = np.flipud(np.round(vals * 255.0).astype(np.uint8))
    Image.fromarray(img, mode="L").save(path)
