from abc import ABC, abstractmethod

import torch
from torch import nn


class Backbone(nn.Module, ABC):
    """Base class for all feature extractors f_theta: image -> z"""

    def __init__(self, embed_dim: int, in_channels: int = 3):
        super().__init__()
        self.embed_dim = embed_dim
        self.in_channels = in_channels

    @abstractmethod
    def forward(self, images: torch.Tensor) -> torch.Tensor:
        """
        Extract embeddings.

        Args:
            images: N x C x H x W tensor

        Returns:
            N x embed_dim tensor
        """
        pass

    @staticmethod
    def _pool(features: torch.Tensor) -> torch.Tensor:
        return features.mean(dim=(2, 3))
