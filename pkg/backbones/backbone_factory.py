from .base_backbone import Backbone
from .conv4 import Conv4Tiny, Conv4Standard
from .resnet12 import ResNet12Lite


class BackboneFactory:
    """Factory class to create backbone instances"""

    _backbones = {
        'conv4-tiny': Conv4Tiny,
        'conv4': Conv4Standard,
        'resnet12-lite': ResNet12Lite,
    }

    @classmethod
    def get_backbone(cls, backbone_name: str, embed_dim: int, in_channels: int = 3) -> Backbone:
        """
        Get a backbone instance by name

        Args:
            backbone_name: Name of the backbone (e.g. 'conv4-tiny')
            embed_dim: Width of the output embedding z
            in_channels: Image channel count

        Returns:
            Backbone instance

        Raises:
            ValueError: If backbone is not supported
        """
        backbone_class = cls._backbones.get(backbone_name.lower() if backbone_name else None)
        if not backbone_class:
            raise ValueError(
                f"Unsupported backbone: {backbone_name}. "
                f"Supported backbones are: {', '.join(cls._backbones.keys())}"
            )
        return backbone_class(embed_dim, in_channels)

    @classmethod
    def names(cls):
        return list(cls._backbones.keys())
