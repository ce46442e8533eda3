import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import pytest
import numpy as np
from sklearn.neighbors import NearestCentroid
from data import synth_dataset


def test_layout():
    """Images are class-major uint8 squares"""
    dataset = synth_dataset(num_classes=4, per_class=3, image_size=16, seed=0)
    assert dataset.images.shape == (12, 16, 16, 3)
    assert dataset.images.dtype == np.uint8
    assert dataset.labels.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3]
    assert dataset.class_names[3] == 'class_003'


def test_seeded():
    """Same seed, same pixels; another seed, other pixels"""
    first = synth_dataset(3, 2, image_size=8, seed=5)
    assert np.array_equal(first.images, synth_dataset(3, 2, image_size=8, seed=5).images)
    assert not np.array_equal(first.images, synth_dataset(3, 2, image_size=8, seed=6).images)


def test_orientation_is_visible():
    """The top rows are brighter than the bottom rows on average"""
    images = synth_dataset(4, 5, image_size=32, seed=0).images.astype(np.float64)
    assert images[:, :4].mean() > images[:, -4:].mean()


def test_classes_differ():
    """Class means are distinct"""
    dataset = synth_dataset(8, 10, image_size=16, seed=0)
    means = np.stack([dataset.images[dataset.labels == c].mean(axis=0) for c in range(8)])
    distances = [np.abs(means[a] - means[b]).mean() for a in range(8) for b in range(a + 1, 8)]
    assert min(distances) > 1.0


def test_nearest_centroid_beats_chance():
    """Pixel-space class centroids from one half classify the other half above chance"""
    dataset = synth_dataset(8, 20, image_size=16, seed=0)
    pixels = dataset.images.reshape(len(dataset.labels), -1).astype(np.float64)
    fit, held_out = np.arange(0, len(pixels), 2), np.arange(1, len(pixels), 2)

    classifier = NearestCentroid().fit(pixels[fit], dataset.labels[fit])
    accuracy = np.mean(classifier.predict(pixels[held_out]) == dataset.labels[held_out])
    assert accuracy > 1 / 8


@pytest.mark.parametrize('args', [(0, 1), (1, 0), (1, 1, 1)])
def test_invalid_sizes(args):
    """Counts below one and one-pixel images are argument errors"""
    with pytest.raises(ValueError):
        synth_dataset(*args)
