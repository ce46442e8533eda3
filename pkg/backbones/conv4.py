from typing import Sequence

import torch
from torch import nn

from .base_backbone import Backbone


def conv_block(in_channels: int, out_channels: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, 3, padding=1, bias=False),
        nn.BatchNorm2d(out_channels),
        nn.ReLU(),
        nn.MaxPool2d(2, ceil_mode=True),
    )


class Conv4(Backbone):
    """Four conv-BN-ReLU-pool blocks followed by global average pooling"""

    def __init__(self, embed_dim: int, widths: Sequence[int], in_channels: int = 3):
        super().__init__(embed_dim, in_channels)
        channels = [in_channels] + list(widths) + [embed_dim]
        self.encoder = nn.Sequential(*[
            conv_block(channels[i], channels[i + 1]) for i in range(len(channels) - 1)
        ])

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        return self._pool(self.encoder(images))


class Conv4Tiny(Conv4):
    """Desk-scale default, trainable on a CPU"""

    def __init__(self, embed_dim: int, in_channels: int = 3):
        super().__init__(embed_dim, widths=(32, 32, 64), in_channels=in_channels)


class Conv4Standard(Conv4):
    def __init__(self, embed_dim: int, in_channels: int = 3):
        super().__init__(embed_dim, widths=(64, 64, 64), in_channels=in_channels)
