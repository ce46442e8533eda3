import torch
from torch import nn

from .base_backbone import Backbone


class ResidualStage(nn.Module):
    """Three 3x3 conv-BN layers with a projected shortcut, then 2x2 max pooling"""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        layers = []
        for i in range(3):
            layers.append(nn.Conv2d(in_channels if i == 0 else out_channels, out_channels, 3,
                                    padding=1, bias=False))
            layers.append(nn.BatchNorm2d(out_channels))
            if i < 2:
                layers.append(nn.ReLU())
        self.body = nn.Sequential(*layers)
        self.shortcut = nn.Sequential(
            nn.Conv2d(in_channels, out_channels, 1, bias=False),
            nn.BatchNorm2d(out_channels),
        )
        self.relu = nn.ReLU()
        self.pool = nn.MaxPool2d(2, ceil_mode=True)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.pool(self.relu(self.body(x) + self.shortcut(x)))


class ResNet12Lite(Backbone):
    """Narrow ResNet-12 for larger runs; the last stage width is embed_dim"""

    def __init__(self, embed_dim: int, in_channels: int = 3):
        super().__init__(embed_dim, in_channels)
        widths = [in_channels, 32, 64, 128, embed_dim]
        self.stages = nn.Sequential(*[ResidualStage(widths[i], widths[i + 1]) for i in range(4)])

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        return self._pool(self.stages(images))
