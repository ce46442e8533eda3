"""Photometric and crop/flip augmentation applied before transform expansion."""
import numpy as np

from constants import CROP_PADDING, JITTER_STRENGTH

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float32)


def to_float(image: np.ndarray) -> np.ndarray:
    if image.dtype == np.uint8:
        return image.astype(np.float32) / 255.0
    return image.astype(np.float32)


def random_crop(image: np.ndarray, top: int, left: int, padding: int = CROP_PADDING) -> np.ndarray:
    height, width = image.shape[:2]
    padded = np.pad(image, ((padding, padding), (padding, padding), (0, 0)), mode='reflect')
    return padded[top:top + height, left:left + width]


def hflip(image: np.ndarray) -> np.ndarray:
    return image[:, ::-1]


def color_jitter(image: np.ndarray, brightness: float, contrast: float, saturation: float) -> np.ndarray:
    """Scale brightness, contrast around the mean gray, and saturation around per-pixel gray"""
    out = image * brightness
    gray = out @ _LUMA
    out = out * contrast + gray.mean() * (1.0 - contrast)
    gray = (out @ _LUMA)[..., None]
    out = out * saturation + gray * (1.0 - saturation)
    return np.clip(out, 0.0, 1.0)


def standard_augment(image: np.ndarray, rng: np.random.Generator,
                     padding: int = CROP_PADDING, jitter: float = JITTER_STRENGTH) -> np.ndarray:
    """
    Reflect-pad and crop back to size, flip horizontally with p=0.5, then
    jitter brightness, contrast and saturation by factors in [1-jitter, 1+jitter].

    Args:
        image: H x W x C, uint8 or float in [0, 1]
        rng: source of the random draws

    Returns:
        float32 image in [0, 1] of the same shape
    """
    image = to_float(image)
    padding = min(padding, image.shape[0] - 1, image.shape[1] - 1)
    top, left = rng.integers(0, 2 * padding + 1, size=2)
    out = random_crop(image, int(top), int(left), padding)
    if rng.random() < 0.5:
        out = hflip(out)
    brightness, contrast, saturation = rng.uniform(1.0 - jitter, 1.0 + jitter, size=3)
    if image.shape[2] == 3:
        out = color_jitter(out, brightness, contrast, saturation)
    else:
        out = np.clip(out * brightness, 0.0, 1.0)
    return np.ascontiguousarray(out, dtype=np.float32)
