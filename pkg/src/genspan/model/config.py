"""Model configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SpecInvalid

SELECTOR_MODES = ("select", "concat", "off")


@dataclass
class ModelConfig:
    dim: int = 32
    state_size: int = 16
    num_layers: int = 4
    conv_kernel: int = 3
    keep_ratio: float = 0.33
    gcn_layers: int = 1
    selector_mode: str = "select"
    # Alternative reading of the keep ratio: prune the prior tokens fed to
    # concat mode instead of the candidate tokens. Off by default; the
    # candidate-token reading is the one the engine endorses.
    keep_ratio_on_prior: bool = False

    def validate(self) -> None:
        if self.dim < 1 or self.state_size < 1 or self.num_layers < 1 or self.gcn_layers < 1:
            raise SpecInvalid("dim, state_size, num_layers, gcn_layers must be >= 1")
        if not (0.0 < self.keep_ratio <= 1.0):
            raise SpecInvalid(f"keep_ratio {self.keep_ratio} outside (0, 1]")
        if self.conv_kernel < 1 or self.conv_kernel % 2 == 0:
            raise SpecInvalid(f"conv_kernel {self.conv_kernel} must be odd and >= 1")
        if self.selector_mode not in SELECTOR_MODES:
            raise SpecInvalid(f"selector_mode {self.selector_mode!r} not in {SELECTOR_MODES}")

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "state_size": self.state_size,
            "num_layers": self.num_layers,
            "conv_kernel": self.conv_kernel,
            "keep_ratio": self.keep_ratio,
            "gcn_layers": self.gcn_layers,
            "selector_mode": self.selector_mode,
            "keep_ratio_on_prior": self.keep_ratio_on_prior,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        cfg = cls()
        for key in (
            "dim", "state_size", "num_layers", "conv_kernel", "gcn_layers",
        ):
            if key in doc:
                setattr(cfg, key, int(doc[key]))
        if "keep_ratio" in doc:
            cfg.keep_ratio = float(doc["keep_ratio"])
        if "selector_mode" in doc:
            cfg.selector_mode = str(doc["selector_mode"])
        if "keep_ratio_on_prior" in doc:
            cfg.keep_ratio_on_prior = bool(doc["keep_ratio_on_prior"])
        cfg.validate()
        return cfg
