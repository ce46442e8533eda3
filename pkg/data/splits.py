from dataclasses import dataclass, field
from typing import List, Tuple
import logging
import os

import numpy as np

from errors import ConfigError
from .dataset import LabeledDataset

logger = logging.getLogger(__name__)

MANIFEST_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'manifests')
CIFAR_FS_MANIFEST = os.path.join(MANIFEST_DIR, 'cifar_fs')
SPLITS = ('train', 'val', 'test')


@dataclass
class SplitManifest:
    """Class names routed to each split; the three lists are disjoint"""
    train: List[str] = field(default_factory=list)
    val: List[str] = field(default_factory=list)
    test: List[str] = field(default_factory=list)

    def __post_init__(self):
        seen = {}
        for split in SPLITS:
            for name in getattr(self, split):
                if name in seen:
                    raise ConfigError(f"Class '{name}' appears in both '{seen[name]}' and '{split}' splits")
                seen[name] = split


def load_manifest(directory: str) -> SplitManifest:
    """Read train.txt, val.txt and test.txt (one class name per line)"""
    lists = {}
    for split in SPLITS:
        path = os.path.join(directory, f'{split}.txt')
        if not os.path.exists(path):
            lists[split] = []
            continue
        with open(path) as handle:
            lists[split] = [line.strip() for line in handle if line.strip() and not line.startswith('#')]
    return SplitManifest(**lists)


def class_range_manifest(class_names: List[str], n_train: int, n_val: int = 0) -> SplitManifest:
    """First n_train classes to train, next n_val to val, the rest to test"""
    if n_train + n_val > len(class_names):
        raise ConfigError(f"{n_train} train + {n_val} val classes exceed the {len(class_names)} available")
    return SplitManifest(
        train=list(class_names[:n_train]),
        val=list(class_names[n_train:n_train + n_val]),
        test=list(class_names[n_train + n_val:]),
    )


def _select(dataset: LabeledDataset, names: List[str]) -> LabeledDataset:
    index = {name: i for i, name in enumerate(dataset.class_names)}
    unknown = [name for name in names if name not in index]
    if unknown:
        raise ConfigError(f"Unknown class names in manifest: {', '.join(unknown)}")
    old_ids = np.array([index[name] for name in names], dtype=np.int64)
    mask = np.isin(dataset.labels, old_ids)
    remap = np.full(max(len(dataset.class_names), 1), -1, dtype=np.int64)
    remap[old_ids] = np.arange(len(names))
    return LabeledDataset(dataset.images[mask], remap[dataset.labels[mask]], names)


def apply_split(dataset: LabeledDataset, manifest: SplitManifest) -> Tuple[LabeledDataset, LabeledDataset, LabeledDataset]:
    """
    Route images to train/val/test by class.

    Labels are re-indexed in manifest order and instance ids re-based per split.
    """
    parts = tuple(_select(dataset, getattr(manifest, split)) for split in SPLITS)
    logger.info("Split into %s classes / %s images",
                '/'.join(str(p.num_classes) for p in parts), '/'.join(str(len(p)) for p in parts))
    return parts
