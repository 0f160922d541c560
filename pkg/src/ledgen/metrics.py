"""Nine-metric depth evaluation suite with ROI masks and distance bins.

Conventions: natural log for RMSE Log and SILog, base-10 only for the
Log10 metric. SILog uses the full variance form
100 * sqrt(mean(e^2) - w * mean(e)^2) with w = 1 by default, which makes
it exactly a scale-invariant standard deviation of log errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .scene import DepthMap

ROI_BOUNDS_320 = (20, 270, 165, 210)  # x_lo, x_hi, y_lo, y_hi inclusive, at 320x320


@dataclass(frozen=True)
class EvalMask:
    kind: str  # roi | outside_roi | full | custom
    mask: np.ndarray  # (H, W) bool

    @property
    def n_true(self):
        return int(self.mask.sum())


def roi_mask(kind: str, width: int = 320, height: int = 320) -> EvalMask:
    """Named evaluation mask; ROI bounds are defined at 320x320 and scale."""
    if width <= 0 or height <= 0:
        raise ContractError("mask dimensions must be positive")
    if kind == "full":
        return EvalMask("full", np.ones((height, width), dtype=bool))
    if kind not in ("roi", "outside_roi"):
        raise ContractError(f"unknown mask kind {kind!r}")
    x_lo, x_hi, y_lo, y_hi = ROI_BOUNDS_320
    sx = width / 320.0
    sy = height / 320.0
    x0, x1 = round(x_lo * sx), round(x_hi * sx)
    y0, y1 = round(y_lo * sy), round(y_hi * sy)
    m = np.zeros((height, width), dtype=bool)
    m[y0 : y1 + 1, x0 : x1 + 1] = True
    if kind == "outside_roi":
        m = ~m
    return EvalMask(kind, m)


@dataclass
class MetricsReport:
    rmse: float
    abs_rel: float
    log10: float
    rmse_log: float
    silog: float
    sq_rel: float
    delta1: float
    delta2: float
    delta3: float
    n_pixels: int
    bins: list = field(default_factory=list)  # [(lo, hi, MetricsReport | None)]

    def to_dict(self):
        d = {
            "rmse": self.rmse,
            "abs_rel": self.abs_rel,
            "log10": self.log10,
            "rmse_log": self.rmse_log,
            "silog": self.silog,
            "sq_rel": self.sq_rel,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta3": self.delta3,
            "n_pixels": self.n_pixels,
        }
        if self.bins:
            d["bins"] = [
                {"lo": lo, "hi": hi, "report": (r.to_dict() if r is not None else None)}
                for lo, hi, r in self.bins
            ]
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _evaluated_pixels(pred: DepthMap, gt: DepthMap, mask: EvalMask | None):
    if pred.values.shape != gt.values.shape:
        raise ContractError("prediction and ground truth dimensions differ")
    sel = pred.valid & gt.valid
    if mask is not None:
        if mask.mask.shape != gt.values.shape:
            raise ContractError("mask dimensions do not match the depth maps")
        sel &= mask.mask
    d = pred.values[sel]
    g = gt.values[sel]
    if d.size == 0:
        raise ContractError("no valid pixels to evaluate")
    if np.any(d <= 0) or np.any(g <= 0):
        raise ContractError("evaluated depths must be positive")
    return d, g


def metrics_from_pixels(d: np.ndarray, g: np.ndarray, silog_weight: float = 1.0) -> MetricsReport:
    """Metrics over a flat pool of (prediction, ground-truth) pixel pairs."""
    d = np.asarray(d, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if d.size == 0:
        raise ContractError("no valid pixels to evaluate")
    if np.any(d <= 0) or np.any(g <= 0):
        raise ContractError("evaluated depths must be positive")
    diff = d - g
    e = np.log(d) - np.log(g)
    ratio = np.maximum(d / g, g / d)
    me2 = float(np.mean(e**2))
    me = float(np.mean(e))
    var = max(me2 - silog_weight * me * me, 0.0)
    return MetricsReport(
        rmse=float(np.sqrt(np.mean(diff**2))),
        abs_rel=float(np.mean(np.abs(diff) / g)),
        log10=float(np.mean(np.abs(np.log10(d) - np.log10(g)))),
        rmse_log=float(np.sqrt(me2)),
        silog=100.0 * math.sqrt(var),
        sq_rel=float(np.mean(diff**2 / g)),
        delta1=float(np.mean(ratio < 1.25)),
        delta2=float(np.mean(ratio < 1.25**2)),
        delta3=float(np.mean(ratio < 1.25**3)),
        n_pixels=int(d.size),
    )


def compute_metrics(pred: DepthMap, gt: DepthMap, mask: EvalMask | None = None,
                    silog_weight: float = 1.0) -> MetricsReport:
    """The nine standard depth metrics over valid pixels inside the mask."""
    d, g = _evaluated_pixels(pred, gt, mask)
    return metrics_from_pixels(d, g, silog_weight)


def binned_metrics(pred: DepthMap, gt: DepthMap, mask: EvalMask | None = None,
                   bin_edges=None, silog_weight: float = 1.0) -> MetricsReport:
    """Overall report plus per-distance-bin reports (binned by ground truth)."""
    if bin_edges is None:
        bin_edges = list(np.arange(0.0, 101.0, 10.0))
    edges = [float(b) for b in bin_edges]
    if len(edges) < 2 or any(hi <= lo for lo, hi in zip(edges, edges[1:])):
        raise ContractError("bin edges must be strictly increasing, at least 2")
    d, g = _evaluated_pixels(pred, gt, mask)
    report = metrics_from_pixels(d, g, silog_weight)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (g >= lo) & (g < hi)
        if not np.any(sel):
            report.bins.append((lo, hi, None))
        else:
            report.bins.append((lo, hi, metrics_from_pixels(d[sel], g[sel], silog_weight)))
    return report


def pooled_metrics(pairs, mode: str = "pool", silog_weight: float = 1.0) -> MetricsReport:
    """Aggregate many frames.

    mode 'pool': one pixel pool over all frames (default, robust to
    frames with tiny valid counts). mode 'frame_mean': unweighted mean
    of per-frame metric values.
    """
    pairs = list(pairs)
    if not pairs:
        raise ContractError("no frames to evaluate")
    if mode == "pool":
        d = np.concatenate([p[0] for p in pairs])
        g = np.concatenate([p[1] for p in pairs])
        return metrics_from_pixels(d, g, silog_weight)
    if mode != "frame_mean":
        raise ContractError(f"unknown aggregation mode {mode!r}")
    reports = [metrics_from_pixels(d, g, silog_weight) for d, g in pairs]
    fields = ("rmse", "abs_rel", "log10", "rmse_log", "silog", "sq_rel",
              "delta1", "delta2", "delta3")
    agg = {f: math.fsum(getattr(r, f) for r in reports) / len(reports) for f in fields}
    return MetricsReport(n_pixels=sum(r.n_pixels for r in reports), **agg)
