from .config import TrainConfig
from .data import FrameSet, load_split, read_manifest, read_pfm, write_pfm
from .losses import total_loss
from .model import DepthNet
from .predict import predict
from .train import train

__version__ = "0.1.0"

__all__ = [
    "TrainConfig",
    "FrameSet",
    "DepthNet",
    "load_split",
    "read_manifest",
    "read_pfm",
    "write_pfm",
    "total_loss",
    "train",
    "predict",
]
