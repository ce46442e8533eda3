import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import pytest
import numpy as np
from unittest.mock import Mock
from data import standard_augment
from data.augment import color_jitter, hflip, random_crop


@pytest.fixture
def image():
    return np.random.default_rng(0).integers(0, 256, size=(8, 8, 3), dtype=np.uint8)


def scripted_rng(top=4, left=4, flip=0.9, factors=(1.0, 1.0, 1.0)):
    rng = Mock()
    rng.integers.return_value = np.array([top, left])
    rng.random.return_value = flip
    rng.uniform.return_value = np.array(factors)
    return rng


def test_neutral_draws_return_the_image(image):
    """Centered crop, no flip and unit factors leave the image as floats"""
    out = standard_augment(image, scripted_rng())
    assert out.dtype == np.float32
    assert np.allclose(out, image / 255.0, atol=1e-6)


def test_flip_draw(image):
    """A draw below one half flips horizontally"""
    out = standard_augment(image, scripted_rng(flip=0.1))
    assert np.allclose(out, image[:, ::-1] / 255.0, atol=1e-6)


def test_crop_offset(image):
    """Crop offsets shift the image inside the reflected padding"""
    out = standard_augment(image, scripted_rng(top=5, left=4))
    assert np.allclose(out[:-1], image[1:] / 255.0, atol=1e-6)


def test_jitter_range_requested(image):
    """Factors are drawn from [0.6, 1.4]"""
    rng = scripted_rng()
    standard_augment(image, rng)
    rng.uniform.assert_called_once_with(0.6, 1.4, size=3)


def test_output_stays_in_unit_range(image):
    """Random augmentation keeps values in [0, 1] and the shape unchanged"""
    rng = np.random.default_rng(1)
    for _ in range(20):
        out = standard_augment(image, rng)
        assert out.shape == image.shape
        assert out.min() >= 0.0 and out.max() <= 1.0


def test_helpers():
    """Crop without offset at full padding and flip are exact"""
    image = np.arange(2 * 3 * 1, dtype=np.float32).reshape(2, 3, 1)
    assert np.array_equal(hflip(image)[:, :, 0], [[2, 1, 0], [5, 4, 3]])
    assert np.array_equal(random_crop(image, 1, 1, padding=1), image)


def test_gray_is_saturation_fixed_point():
    """Saturation and contrast leave a uniform gray image unchanged"""
    gray = np.full((4, 4, 3), 0.5, dtype=np.float32)
    assert np.allclose(color_jitter(gray, 1.0, 1.3, 0.7), gray, atol=1e-6)
