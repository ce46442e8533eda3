"""CIFAR-100 binary format.

Each record is 3074 bytes: coarse label, fine label, then 3072 pixel bytes
stored channel-planar (1024 red, 1024 green, 1024 blue), each plane row-major
32 x 32. Fine labels index the alphabetical class list below.
"""
from typing import List, Optional, Sequence
import logging
import os

import numpy as np

from constants import CIFAR_IMAGE_SIDE, CIFAR_RECORD_BYTES
from errors import DataFormatError
from .dataset import LabeledDataset

logger = logging.getLogger(__name__)

CIFAR100_FINE_LABELS = [
    'apple', 'aquarium_fish', 'baby', 'bear', 'beaver', 'bed', 'bee', 'beetle', 'bicycle', 'bottle',
    'bowl', 'boy', 'bridge', 'bus', 'butterfly', 'camel', 'can', 'castle', 'caterpillar', 'cattle',
    'chair', 'chimpanzee', 'clock', 'cloud', 'cockroach', 'couch', 'crab', 'crocodile', 'cup', 'dinosaur',
    'dolphin', 'elephant', 'flatfish', 'forest', 'fox', 'girl', 'hamster', 'house', 'kangaroo', 'keyboard',
    'lamp', 'lawn_mower', 'leopard', 'lion', 'lizard', 'lobster', 'man', 'maple_tree', 'motorcycle', 'mountain',
    'mouse', 'mushroom', 'oak_tree', 'orange', 'orchid', 'otter', 'palm_tree', 'pear', 'pickup_truck', 'pine_tree',
    'plain', 'plate', 'poppy', 'porcupine', 'possum', 'rabbit', 'raccoon', 'ray', 'road', 'rocket',
    'rose', 'sea', 'seal', 'shark', 'shrew', 'skunk', 'skyscraper', 'snail', 'snake', 'spider',
    'squirrel', 'streetcar', 'sunflower', 'sweet_pepper', 'table', 'tank', 'telephone', 'television', 'tiger', 'tractor',
    'train', 'trout', 'tulip', 'turtle', 'wardrobe', 'whale', 'willow_tree', 'wolf', 'woman', 'worm',
]

_PIXELS = CIFAR_RECORD_BYTES - 2


def load_cifar100_binary(path: str, class_names: Optional[List[str]] = None) -> LabeledDataset:
    """
    Parse a CIFAR-100 binary file; fine labels are used.

    Raises:
        DataFormatError: length not a multiple of 3074 bytes, or a fine label
            outside the class list (the message names the byte offset)
    """
    class_names = class_names or CIFAR100_FINE_LABELS
    try:
        with open(path, 'rb') as handle:
            raw = handle.read()
    except OSError as e:
        raise DataFormatError(f"Could not read {path}: {e}") from e

    if len(raw) % CIFAR_RECORD_BYTES:
        offset = (len(raw) // CIFAR_RECORD_BYTES) * CIFAR_RECORD_BYTES
        raise DataFormatError(
            f"{path} has {len(raw)} bytes, not a multiple of {CIFAR_RECORD_BYTES}; partial record", offset
        )

    records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
    fine = records[:, 1].astype(np.int64)
    bad = np.flatnonzero(fine >= len(class_names))
    if len(bad):
        raise DataFormatError(f"Fine label {fine[bad[0]]} outside {len(class_names)} classes",
                              int(bad[0]) * CIFAR_RECORD_BYTES + 1)
    side = CIFAR_IMAGE_SIDE
    images = records[:, 2:].reshape(-1, 3, side, side).transpose(0, 2, 3, 1)
    logger.info("Loaded %d CIFAR records from %s", len(records), path)
    return LabeledDataset(images, fine, class_names)


def write_cifar100_binary(dataset: LabeledDataset, path: str,
                          coarse_labels: Optional[Sequence[int]] = None) -> str:
    """Write a dataset of 32 x 32 x 3 images in the CIFAR-100 binary layout"""
    if len(dataset) and dataset.image_shape != (CIFAR_IMAGE_SIDE, CIFAR_IMAGE_SIDE, 3):
        raise DataFormatError(f"CIFAR layout needs 32 x 32 x 3 images, got {dataset.image_shape}")
    if dataset.num_classes > 256:
        raise DataFormatError(f"CIFAR layout stores labels in one byte; {dataset.num_classes} classes")
    records = np.zeros((len(dataset), CIFAR_RECORD_BYTES), dtype=np.uint8)
    if coarse_labels is not None:
        records[:, 0] = np.asarray(coarse_labels, dtype=np.uint8)
    records[:, 1] = dataset.labels.astype(np.uint8)
    records[:, 2:] = dataset.images.transpose(0, 3, 1, 2).reshape(len(dataset), _PIXELS)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'wb') as handle:
        handle.write(records.tobytes())
    return path


def load_cifar100_dir(directory: str) -> LabeledDataset:
    """Both official files of a CIFAR-100 binary directory, train first"""
    parts = [load_cifar100_binary(os.path.join(directory, name)) for name in ('train.bin', 'test.bin')]
    return LabeledDataset(
        np.concatenate([p.images for p in parts]),
        np.concatenate([p.labels for p in parts]),
        CIFAR100_FINE_LABELS,
    )
