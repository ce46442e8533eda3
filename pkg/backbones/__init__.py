from .base_backbone import Backbone
from .conv4 import Conv4, Conv4Tiny, Conv4Standard
from .resnet12 import ResNet12Lite
from .backbone_factory import BackboneFactory

__all__ = [
    'Backbone',
    'Conv4',
    'Conv4Tiny',
    'Conv4Standard',
    'ResNet12Lite',
    'BackboneFactory'
]
