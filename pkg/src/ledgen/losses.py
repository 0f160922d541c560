"""Depth-training objective: log-L1 depth term, gradient L1 term, normal
cosine term, their weighted sum, analytic gradients, and a
finite-difference verifier.

Spatial derivatives are forward differences with a replicate boundary
(zero gradient on the last row/column); their adjoint is exact, which
keeps the hand-written gradients cheap and the checker tight.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ContractError

EPSILON_DEPTH = 1e-6


@dataclass(frozen=True)
class LossConfig:
    lambda1: float = 1.0  # gradient-term weight
    lambda2: float = 1.0  # normal-term weight
    depth_variant: str = "log_l1"  # log_l1 | l1
    grad_variant: str = "l1"  # l1 | log_l1
    use_normal: bool = True
    epsilon: float = EPSILON_DEPTH

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ContractError("loss weights must be non-negative")
        if self.epsilon <= 0:
            raise ContractError("epsilon must be positive")
        if self.depth_variant not in ("log_l1", "l1"):
            raise ContractError(f"unknown depth variant {self.depth_variant!r}")
        if self.grad_variant not in ("l1", "log_l1"):
            raise ContractError(f"unknown gradient variant {self.grad_variant!r}")


# the seven loss combinations of the ablation study
ABLATION_CONFIGS = (
    LossConfig(depth_variant="l1", lambda1=0.0, lambda2=0.0, use_normal=False),
    LossConfig(depth_variant="log_l1", lambda1=0.0, lambda2=0.0, use_normal=False),
    LossConfig(depth_variant="log_l1", grad_variant="l1", lambda2=0.0, use_normal=False),
    LossConfig(depth_variant="log_l1", grad_variant="log_l1", lambda2=0.0, use_normal=False),
    LossConfig(depth_variant="log_l1", lambda1=0.0, use_normal=True),
    LossConfig(depth_variant="log_l1", grad_variant="log_l1", use_normal=True),
    LossConfig(depth_variant="log_l1", grad_variant="l1", use_normal=True),
)


@dataclass
class LossValue:
    total: float
    depth_term: float
    grad_term: float
    normal_term: float
    gradient: np.ndarray  # d total / d d_i, zero at invalid pixels


def spatial_gradients(a: np.ndarray):
    """Forward differences along x (columns) and y (rows), replicate boundary."""
    a = np.asarray(a, dtype=np.float64)
    gx = np.zeros_like(a)
    gy = np.zeros_like(a)
    gx[:, :-1] = a[:, 1:] - a[:, :-1]
    gy[:-1, :] = a[1:, :] - a[:-1, :]
    return gx, gy


def _adjoint_accumulate_x(out, v):
    """out += Dx^T v for the forward-difference Dx above."""
    out[:, 1:] += v[:, :-1]
    out[:, :-1] -= v[:, :-1]


def _adjoint_accumulate_y(out, v):
    out[1:, :] += v[:-1, :]
    out[:-1, :] -= v[:-1, :]


def _check_inputs(d, g, valid):
    d = np.asarray(d, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if d.shape != g.shape or d.ndim != 2:
        raise ContractError("d and g must be 2-D arrays of the same shape")
    if valid is None:
        valid = np.ones(d.shape, dtype=bool)
    else:
        valid = np.asarray(valid, dtype=bool)
        if valid.shape != d.shape:
            raise ContractError("mask shape mismatch")
    if not np.any(valid):
        raise ContractError("no valid pixels")
    return d, g, valid


def loss_depth(d, g, valid=None, variant="log_l1", epsilon=EPSILON_DEPTH):
    """Mean absolute (log-)depth error and its gradient w.r.t. d."""
    d, g, valid = _check_inputs(d, g, valid)
    n = int(valid.sum())
    grad = np.zeros_like(d)
    if variant == "log_l1":
        dc = np.maximum(d, epsilon)
        gc = np.maximum(g, epsilon)
        e = np.log(dc) - np.log(gc)
        value = float(np.sum(np.abs(e)[valid])) / n
        grad[valid] = np.sign(e[valid]) / (n * dc[valid])
        grad[valid & (d < epsilon)] = 0.0
    else:
        e = d - g
        value = float(np.sum(np.abs(e)[valid])) / n
        grad[valid] = np.sign(e[valid]) / n
    return value, grad


def _active_x(valid):
    act = np.zeros_like(valid)
    act[:, :-1] = valid[:, :-1] & valid[:, 1:]
    return act


def _active_y(valid):
    act = np.zeros_like(valid)
    act[:-1, :] = valid[:-1, :] & valid[1:, :]
    return act


def loss_grad(d, g, valid=None, variant="l1", epsilon=EPSILON_DEPTH):
    """Mean L1 distance between spatial gradients of d and g."""
    d, g, valid = _check_inputs(d, g, valid)
    n = int(valid.sum())
    if variant == "log_l1":
        a = np.log(np.maximum(d, epsilon))
        b = np.log(np.maximum(g, epsilon))
        chain = 1.0 / np.maximum(d, epsilon)
    else:
        a, b, chain = d, g, None
    dax, day = spatial_gradients(a)
    dbx, dby = spatial_gradients(b)
    ax = _active_x(valid)
    ay = _active_y(valid)
    ex = np.where(ax, dax - dbx, 0.0)
    ey = np.where(ay, day - dby, 0.0)
    value = float(np.sum(np.abs(ex)) + np.sum(np.abs(ey))) / n
    grad_a = np.zeros_like(d)
    _adjoint_accumulate_x(grad_a, np.sign(ex) / n)
    _adjoint_accumulate_y(grad_a, np.sign(ey) / n)
    grad = grad_a * chain if chain is not None else grad_a
    grad[~valid] = 0.0
    return value, grad


def loss_normal(d, g, valid=None):
    """Mean cosine distance between depth-derived surface normals.

    Normals are (-dx, -dy, 1) from the forward differences; the term is
    active where the pixel and both forward neighbors are valid.
    """
    d, g, valid = _check_inputs(d, g, valid)
    n = int(valid.sum())
    ddx, ddy = spatial_gradients(d)
    dgx, dgy = spatial_gradients(g)
    # every valid pixel carries a term; differences that would straddle an
    # invalid neighbor are zeroed, same as the replicate boundary
    act = valid
    nd = np.stack([-ddx, -ddy, np.ones_like(d)], axis=-1)
    ng = np.stack([-dgx, -dgy, np.ones_like(d)], axis=-1)
    # zero out differences that straddle invalid pixels
    mx = _active_x(valid)
    my = _active_y(valid)
    nd[..., 0] *= mx
    nd[..., 1] *= my
    ng[..., 0] *= mx
    ng[..., 1] *= my
    nu = np.linalg.norm(nd, axis=-1)
    nv = np.linalg.norm(ng, axis=-1)
    dot = np.sum(nd * ng, axis=-1)
    cos = dot / (nu * nv)
    term = np.where(act, np.abs(1.0 - cos), 0.0)
    value = float(np.sum(term)) / n
    # d term / d nd, with sign(1 - cos) (subgradient 1 at equality)
    s = np.where(cos <= 1.0, 1.0, -1.0)
    coef = s[..., None] * -(ng / (nu * nv)[..., None] - (cos / nu**2)[..., None] * nd)
    coef[~act] = 0.0
    grad = np.zeros_like(d)
    _adjoint_accumulate_x(grad, -coef[..., 0] * mx / n)
    _adjoint_accumulate_y(grad, -coef[..., 1] * my / n)
    grad[~valid] = 0.0
    return value, grad


def loss_total(d, g, valid=None, cfg: LossConfig | None = None) -> LossValue:
    """Weighted combination of the three terms, with the assembled gradient."""
    cfg = cfg or LossConfig()
    vd, gd = loss_depth(d, g, valid, cfg.depth_variant, cfg.epsilon)
    if cfg.lambda1 > 0:
        vg, gg = loss_grad(d, g, valid, cfg.grad_variant, cfg.epsilon)
    else:
        vg, gg = 0.0, 0.0
    if cfg.use_normal and cfg.lambda2 > 0:
        vn, gn = loss_normal(d, g, valid)
    else:
        vn, gn = 0.0, 0.0
    total = vd + cfg.lambda1 * vg + cfg.lambda2 * vn
    grad = gd + cfg.lambda1 * gg + cfg.lambda2 * gn
    return LossValue(total, vd, vg, vn, grad)


def gradcheck(d, g, valid=None, cfg: LossConfig | None = None, h: float = 1e-4,
              max_pixels: int = 32, rng=None) -> float:
    """Max relative gap between analytic and central-difference gradients.

    Pixels whose perturbation could cross an L1 kink (any relevant
    absolute-value argument smaller than 10*h) are excluded.
    """
    cfg = cfg or LossConfig()
    d, g, valid = _check_inputs(d, g, valid)
    if np.any(d[valid] <= h):
        raise ContractError("d must exceed h everywhere for the finite difference")
    rng = rng or np.random.default_rng(0)
    base = loss_total(d, g, valid, cfg)

    # kink arguments influenced by pixel (i, j)
    if cfg.depth_variant == "log_l1":
        kd = np.abs(np.log(np.maximum(d, cfg.epsilon)) - np.log(np.maximum(g, cfg.epsilon)))
    else:
        kd = np.abs(d - g)
    if cfg.grad_variant == "log_l1":
        a, b = np.log(np.maximum(d, cfg.epsilon)), np.log(np.maximum(g, cfg.epsilon))
    else:
        a, b = d, g
    dax, day = spatial_gradients(a)
    dbx, dby = spatial_gradients(b)
    ex = np.abs(dax - dbx)
    ey = np.abs(day - dby)
    thresh = 10.0 * h
    safe = valid & (kd > thresh)
    if cfg.lambda1 > 0:
        kx = np.minimum(ex, np.roll(ex, 1, axis=1))
        ky = np.minimum(ey, np.roll(ey, 1, axis=0))
        safe &= (kx > thresh) & (ky > thresh)

    candidates = np.argwhere(safe)
    if len(candidates) == 0:
        raise ContractError("no kink-free pixels to test; lower h or change inputs")
    pick = candidates[rng.permutation(len(candidates))[:max_pixels]]
    worst = 0.0
    for i, j in pick:
        dp = d.copy()
        dp[i, j] += h
        lp = loss_total(dp, g, valid, cfg).total
        dp[i, j] = d[i, j] - h
        lm = loss_total(dp, g, valid, cfg).total
        numeric = (lp - lm) / (2 * h)
        analytic = base.gradient[i, j]
        rel = abs(analytic - numeric) / max(abs(numeric), abs(analytic), 1e-8)
        worst = max(worst, rel)
    return worst
