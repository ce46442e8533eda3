import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import pytest
import numpy as np
import torch
from transforms import apply_transform, build_preset, expand_batch


@pytest.fixture
def batch():
    rng = np.random.default_rng(0)
    images = rng.random((3, 8, 8, 3)).astype(np.float32)
    return images, np.array([2, 0, 1]), np.array([10, 11, 12])


def test_expand_batch_layout(batch):
    """Rows are transform-major with tiled labels and repeated proxy labels"""
    images, labels, ids = batch
    transform_set = build_preset('m4')

    expanded = expand_batch(images, labels, ids, transform_set)

    assert expanded.images.shape == (12, 8, 8, 3)
    assert expanded.batch_size == 3
    assert expanded.class_labels.tolist() == [2, 0, 1] * 4
    assert expanded.instance_ids.tolist() == [10, 11, 12] * 4
    assert expanded.proxy_labels.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3]
    for m, spec in enumerate(transform_set):
        for b in range(3):
            assert np.array_equal(expanded.images[m * 3 + b], apply_transform(images[b], spec))


def test_identity_block_is_source(batch):
    """Block 0 holds the untouched source images"""
    images, labels, ids = batch
    expanded = expand_batch(images, labels, ids, build_preset('m16'))
    assert np.array_equal(expanded.images[:3], images)


def test_workers_do_not_change_output(batch):
    """Threaded expansion equals the serial result"""
    images, labels, ids = batch
    transform_set = build_preset('m16')
    serial = expand_batch(images, labels, ids, transform_set, workers=1)
    threaded = expand_batch(images, labels, ids, transform_set, workers=4)
    assert np.array_equal(serial.images, threaded.images)


def test_as_tensors_layout(batch):
    """Tensors come out NCHW with matching label tensors"""
    images, labels, ids = batch
    expanded = expand_batch(images, labels, ids, build_preset('m3'))

    tensor, class_labels, proxy_labels, instance_ids = expanded.as_tensors(dtype=torch.float64)

    assert tensor.shape == (9, 3, 8, 8)
    assert tensor.dtype == torch.float64
    assert torch.equal(class_labels, torch.tensor([2, 0, 1] * 3))
    assert proxy_labels.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    assert instance_ids.tolist() == [10, 11, 12] * 3


def test_empty_batch_rejected():
    """An empty batch is an argument error"""
    with pytest.raises(ValueError):
        expand_batch(np.zeros((0, 8, 8, 3)), [], [], build_preset('m4'))


def test_mismatched_lengths_rejected(batch):
    """Labels and ids must match the image count"""
    images, labels, ids = batch
    with pytest.raises(ValueError):
        expand_batch(images, labels[:2], ids, build_preset('m4'))
