"""Procedural image corpus for fast, deterministic runs.

Every image has a vertical light gradient (bright top) so orientation is
recoverable, plus one class-specific shape in a class-specific color. Each
instance jitters position, size, color and pixel noise.
"""
import colorsys

import numpy as np

from .dataset import LabeledDataset

SHAPES = ('disk', 'square', 'triangle', 'cross', 'ring', 'bar', 'arrow', 'checker')


def _shape_mask(shape: str, xs: np.ndarray, ys: np.ndarray, radius: float) -> np.ndarray:
    ax, ay = np.abs(xs), np.abs(ys)
    if shape == 'disk':
        return xs ** 2 + ys ** 2 <= radius ** 2
    if shape == 'square':
        return (ax <= radius * 0.8) & (ay <= radius * 0.8)
    if shape == 'triangle':
        return (ys <= radius * 0.7) & (ys >= 2 * ax - radius)
    if shape == 'cross':
        thick = radius * 0.3
        return ((ax <= thick) & (ay <= radius)) | ((ay <= thick) & (ax <= radius))
    if shape == 'ring':
        r2 = xs ** 2 + ys ** 2
        return (r2 <= radius ** 2) & (r2 >= (radius * 0.55) ** 2)
    if shape == 'bar':
        return (ax <= radius) & (ys >= -radius * 0.25) & (ys <= radius * 0.25)
    if shape == 'arrow':
        head = (ys <= 0) & (ys >= -radius) & (ax <= -ys * 0.8)
        shaft = (ys > 0) & (ys <= radius) & (ax <= radius * 0.2)
        return head | shaft
    checker = ((np.floor(xs / (radius * 0.5)) + np.floor(ys / (radius * 0.5))) % 2 == 0)
    return checker & (ax <= radius) & (ay <= radius)


def _class_color(index: int) -> np.ndarray:
    hue = (index * 0.618033988749895) % 1.0
    value = 0.95 if (index // len(SHAPES)) % 2 == 0 else 0.6
    return np.array(colorsys.hsv_to_rgb(hue, 0.85, value))


def synth_dataset(num_classes: int, per_class: int, image_size: int = 32, seed: int = 0) -> LabeledDataset:
    """
    Render num_classes * per_class images, class-major.

    Args:
        num_classes: number of classes (>= 1)
        per_class: images per class (>= 1)
        image_size: side of the square images
        seed: makes the corpus bit-reproducible
    """
    if num_classes < 1 or per_class < 1 or image_size < 2:
        raise ValueError(f"Counts must be >= 1 and image_size >= 2, got {num_classes}, {per_class}, {image_size}")
    rng = np.random.default_rng(seed)
    coords = np.arange(image_size) - (image_size - 1) / 2.0
    ys, xs = np.meshgrid(coords, coords, indexing='ij')
    gradient = np.linspace(0.55, 0.1, image_size)[:, None, None]

    images = np.empty((num_classes * per_class, image_size, image_size, 3), dtype=np.uint8)
    labels = np.repeat(np.arange(num_classes), per_class)
    for c in range(num_classes):
        shape = SHAPES[c % len(SHAPES)]
        color = _class_color(c)
        for i in range(per_class):
            offset = rng.uniform(-0.12, 0.12, size=2) * image_size
            radius = image_size * 0.25 * rng.uniform(0.8, 1.2)
            tint = np.clip(color + rng.uniform(-0.08, 0.08, size=3), 0.0, 1.0)
            canvas = np.repeat(gradient, image_size, axis=1) * np.ones(3)
            mask = _shape_mask(shape, xs - offset[0], ys - offset[1], radius)
            canvas[mask] = tint
            canvas += rng.normal(0.0, 0.03, size=canvas.shape)
            images[c * per_class + i] = np.clip(np.rint(canvas * 255.0), 0, 255).astype(np.uint8)

    class_names = [f'class_{c:03d}' for c in range(num_classes)]
    return LabeledDataset(images, labels, class_names)
