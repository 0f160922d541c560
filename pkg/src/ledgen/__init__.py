"""Structured-light headlight simulation, depth metrics and loss kernels."""

from .errors import ContractError, FormatError, GenerationError, LedgenError, MeasurementError
from .geometry import (
    CameraIntrinsics,
    Pose,
    ProjectorModel,
    ShadowMap,
    angles_in_projector,
    is_lit,
    project,
    projector_pixel_direction,
    render_shadow_map,
    unproject,
)
from .patterns import Pattern, Photometry, apply_photometry, make_pattern, sample_intensity
from .scene import DepthMap, Scene, SceneConfig, clip_depth, generate_scene, raycast_depth
from .render import RenderedFrame, ShadingParams, measure_cell_size, shade, shade_depth_map
from .metrics import EvalMask, MetricsReport, binned_metrics, compute_metrics, roi_mask
from .losses import (
    ABLATION_CONFIGS,
    LossConfig,
    LossValue,
    gradcheck,
    loss_depth,
    loss_grad,
    loss_normal,
    loss_total,
    spatial_gradients,
)
from .io import read_depth, write_depth
from .dataset import (
    DatasetManifest,
    PreprocessSpec,
    center_crop_resize,
    materialize_dataset,
    subset_manifest,
)

__version__ = "0.1.0"
