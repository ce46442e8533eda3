from .dataset import LabeledDataset, images_to_tensor
from .cifar import CIFAR100_FINE_LABELS, load_cifar100_binary, write_cifar100_binary, load_cifar100_dir
from .splits import SplitManifest, load_manifest, class_range_manifest, apply_split, CIFAR_FS_MANIFEST
from .synthetic import synth_dataset
from .augment import standard_augment

__all__ = [
    'LabeledDataset',
    'images_to_tensor',
    'CIFAR100_FINE_LABELS',
    'load_cifar100_binary',
    'write_cifar100_binary',
    'load_cifar100_dir',
    'SplitManifest',
    'load_manifest',
    'class_range_manifest',
    'apply_split',
    'CIFAR_FS_MANIFEST',
    'synth_dataset',
    'standard_augment'
]
