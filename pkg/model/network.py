from dataclasses import dataclass, asdict
from typing import Optional
import logging

import torch
from torch import nn
import torch.nn.functional as F

from backbones import BackboneFactory
from constants import BACKBONES, DEFAULT_BACKBONE, DEFAULT_EMBED_DIM, INVARIANT_DIM
from errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass
class ModelConfig:
    backbone: str = DEFAULT_BACKBONE
    embed_dim: int = DEFAULT_EMBED_DIM
    num_classes: int = 64
    num_transforms: int = 16
    invariant_dim: int = INVARIANT_DIM
    head_hidden: Optional[int] = None  # defaults to embed_dim
    in_channels: int = 3
    seed: int = 0

    def validate(self) -> 'ModelConfig':
        if self.backbone not in BACKBONES:
            raise ConfigError(
                f"Unsupported backbone: {self.backbone}. Supported backbones are: {', '.join(BACKBONES)}"
            )
        for key in ('embed_dim', 'num_classes', 'num_transforms', 'invariant_dim', 'in_channels'):
            if getattr(self, key) < 1:
                raise ConfigError(f"model.{key} must be >= 1, got {getattr(self, key)}")
        if self.head_hidden is not None and self.head_hidden < 1:
            raise ConfigError(f"model.head_hidden must be >= 1, got {self.head_hidden}")
        return self

    @property
    def hidden_width(self) -> int:
        return self.head_hidden or self.embed_dim

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> 'ModelConfig':
        return cls(**values)


@dataclass
class ModelOutputs:
    z: torch.Tensor
    class_logits: torch.Tensor
    transform_logits: torch.Tensor
    v: torch.Tensor

    def detach(self) -> 'ModelOutputs':
        return ModelOutputs(self.z.detach(), self.class_logits.detach(),
                            self.transform_logits.detach(), self.v.detach())


def mlp_head(in_dim: int, hidden: int, out_dim: int) -> nn.Sequential:
    return nn.Sequential(nn.Linear(in_dim, hidden), nn.ReLU(), nn.Linear(hidden, out_dim))


class EquiInvNet(nn.Module):
    """Shared backbone with classifier, equivariance and invariance heads.

    One backbone pass feeds all three heads. ``backbone_images`` counts the
    images the backbone has processed.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.backbone = BackboneFactory.get_backbone(config.backbone, config.embed_dim, config.in_channels)
        d, h = config.embed_dim, config.hidden_width
        self.classifier = nn.Linear(d, config.num_classes)
        self.equivariant_head = mlp_head(d, h, config.num_transforms)
        self.invariant_head = mlp_head(d, h, config.invariant_dim)
        self.backbone_images = 0

    def _check_images(self, images: torch.Tensor):
        if images.dim() != 4 or images.shape[1] != self.config.in_channels:
            raise ValueError(
                f"Expected images of shape N x {self.config.in_channels} x H x W, got {tuple(images.shape)}"
            )

    def forward(self, images: torch.Tensor) -> ModelOutputs:
        self._check_images(images)
        z = self.backbone(images)
        self.backbone_images += images.shape[0]
        return ModelOutputs(
            z=z,
            class_logits=self.classifier(z),
            transform_logits=self.equivariant_head(z),
            v=F.normalize(self.invariant_head(z), dim=1),
        )

    @torch.no_grad()
    def predict(self, images: torch.Tensor) -> ModelOutputs:
        """forward() in inference mode without gradients"""
        was_training = self.training
        self.eval()
        try:
            return self.forward(images)
        finally:
            self.train(was_training)

    @torch.no_grad()
    def embed(self, images: torch.Tensor) -> torch.Tensor:
        """Backbone embeddings in inference mode; the training flag is restored"""
        self._check_images(images)
        param = next(self.parameters())
        if images.shape[0] == 0:
            return torch.empty(0, self.config.embed_dim, dtype=param.dtype)
        was_training = self.training
        self.eval()
        try:
            return self.backbone(images.to(param.dtype))
        finally:
            self.train(was_training)


def init_model(config: ModelConfig) -> EquiInvNet:
    """
    Build a model with parameters drawn deterministically from config.seed.

    The output layers of the classifier and equivariance head start near
    zero so initial predictions are close to uniform.
    """
    config.validate()
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(config.seed)
        model = EquiInvNet(config)
        for layer in (model.classifier, model.equivariant_head[-1]):
            nn.init.normal_(layer.weight, std=0.01)
            nn.init.zeros_(layer.bias)
    logger.info("Initialized %s model with %d parameters", config.backbone, count_parameters(model))
    return model


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
