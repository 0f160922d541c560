from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for the toy depth regressor.

    The defaults are the desk-scale setup (96x96, short schedule); set
    input_size=320 / epochs=70 to mirror the full-scale recipe.
    """

    input_size: int = 96
    batch_size: int = 32
    learning_rate: float = 1e-3
    weight_decay: float = 1e-2
    epochs: int = 25
    seed: int = 0
    base_channels: int = 16
    # loss mirror: log-L1 depth + lambda1 * gradient L1 + lambda2 * normal
    lambda1: float = 1.0
    lambda2: float = 1.0
    depth_variant: str = "log_l1"
    grad_variant: str = "l1"
    use_normal: bool = True
    epsilon: float = 1e-6

    def __post_init__(self):
        if min(self.input_size, self.batch_size, self.epochs, self.base_channels) <= 0:
            raise ValueError("sizes, batch, epochs and channels must be positive")
        if self.learning_rate <= 0 or self.epsilon <= 0:
            raise ValueError("learning rate and epsilon must be positive")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights must be non-negative")
        if self.depth_variant not in ("log_l1", "l1"):
            raise ValueError(f"unknown depth variant {self.depth_variant!r}")
        if self.grad_variant not in ("l1", "log_l1"):
            raise ValueError(f"unknown gradient variant {self.grad_variant!r}")

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d) -> "TrainConfig":
        return TrainConfig(**d)
