"""Warping images by a TransformSpec.

Images are H x W x C arrays. The forward map is composed as
shear -> aspect ratio -> scale -> rotation -> translation about the image
center, and the output is resampled through its inverse with bilinear
interpolation and zero fill.
"""
import math

import numpy as np
from scipy import ndimage

from .transform_spec import TransformSpec


def forward_matrix(spec: TransformSpec) -> np.ndarray:
    """2x2 linear part of the forward map in (x, y-down) coordinates"""
    shear = np.array([[1.0, math.tan(math.radians(spec.shear))], [0.0, 1.0]])
    root = math.sqrt(spec.aspect_ratio)
    aspect = np.diag([root, 1.0 / root])
    theta = spec.rotation * math.pi / 2
    # counter-clockwise on screen, where y grows downwards
    rotation = np.array([[math.cos(theta), math.sin(theta)], [-math.sin(theta), math.cos(theta)]])
    return rotation @ (spec.scale * aspect) @ shear


def _inverse_map(spec: TransformSpec, height: int, width: int):
    """Matrix and offset mapping output (row, col) to input (row, col)"""
    linear = forward_matrix(spec)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    linear_rc = swap @ linear @ swap
    center = np.array([(height - 1) / 2.0, (width - 1) / 2.0])
    shift = np.array([spec.translate_y * height, spec.translate_x * width])
    matrix = np.linalg.inv(linear_rc)
    offset = center - matrix @ (center + shift)
    return matrix, offset


def _cast_like(warped: np.ndarray, image: np.ndarray) -> np.ndarray:
    if np.issubdtype(image.dtype, np.integer):
        info = np.iinfo(image.dtype)
        return np.clip(np.rint(warped), info.min, info.max).astype(image.dtype)
    return warped.astype(image.dtype)


def apply_transform(image: np.ndarray, spec: TransformSpec) -> np.ndarray:
    """
    Warp one image.

    Args:
        image: H x W x C array with H, W >= 2
        spec: transform to apply

    Returns:
        Array of the same shape and dtype. Quarter turns of square images
        (and half turns of any image) are exact pixel permutations.
    """
    if image.ndim != 3 or image.shape[0] < 2 or image.shape[1] < 2:
        raise ValueError(f"Expected an H x W x C image with H, W >= 2, got shape {image.shape}")

    height, width = image.shape[:2]
    if spec.is_quarter_turn and (height == width or spec.rotation % 2 == 0):
        return np.rot90(image, k=spec.rotation, axes=(0, 1)).copy()

    matrix, offset = _inverse_map(spec, height, width)
    source = image.astype(np.float64)
    channels = [
        ndimage.affine_transform(
            source[..., c], matrix, offset=offset, output_shape=(height, width),
            order=1, mode='constant', cval=0.0, prefilter=False
        )
        for c in range(image.shape[2])
    ]
    return _cast_like(np.stack(channels, axis=-1), image)
