from .transform_spec import TransformSpec, TransformSet, IDENTITY
from .presets import build_preset, sample_affine_subset
from .geometric import apply_transform
from .batch import ExpandedBatch, expand_batch

__all__ = [
    'TransformSpec',
    'TransformSet',
    'IDENTITY',
    'build_preset',
    'sample_affine_subset',
    'apply_transform',
    'ExpandedBatch',
    'expand_batch'
]
