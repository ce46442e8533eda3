from typing import Optional
import logging

import numpy as np
import torch

from data import LabeledDataset
from model import EquiInvNet
from transforms import TransformSet, expand_batch

logger = logging.getLogger(__name__)


def _expanded_outputs(model: EquiInvNet, dataset: LabeledDataset, transform_set: TransformSet,
                      max_images: int, seed: int, batch_size: int):
    count = min(max_images, len(dataset))
    if count < 2:
        raise ValueError(f"Diagnostics need at least 2 images, got {count}")
    chosen = np.sort(np.random.default_rng(seed).choice(len(dataset), size=count, replace=False))
    param = next(model.parameters())
    logits, proxies, invariants = [], [], []
    for start in range(0, count, batch_size):
        ids = chosen[start:start + batch_size]
        images = dataset.images[ids].astype(np.float32) / 255.0
        expanded = expand_batch(images, dataset.labels[ids], ids, transform_set)
        batch_images, _, proxy_labels, _ = expanded.as_tensors(param.device, param.dtype)
        outputs = model.predict(batch_images)
        logits.append(outputs.transform_logits)
        proxies.append(proxy_labels)
        invariants.append(outputs.v.reshape(len(transform_set), len(ids), -1))
    return torch.cat(logits), torch.cat(proxies), torch.cat(invariants, dim=1)


def transform_accuracy(model: EquiInvNet, dataset: LabeledDataset, transform_set: TransformSet,
                       max_images: int = 256, seed: int = 0, batch_size: int = 64) -> float:
    """Fraction of transformed images whose transform index the equivariance head recovers"""
    logits, proxies, _ = _expanded_outputs(model, dataset, transform_set, max_images, seed, batch_size)
    return (logits.argmax(dim=1) == proxies).double().mean().item()


def invariance_gap(model: EquiInvNet, dataset: LabeledDataset, transform_set: TransformSet,
                   max_images: int = 256, seed: int = 0, batch_size: int = 64,
                   pairs: Optional[int] = None) -> float:
    """
    Mean cosine between v of an image and v of its transformed copies, minus
    the mean cosine between v of two different random images.

    Returns:
        The gap; positive when positives sit closer than random pairs
    """
    _, _, v = _expanded_outputs(model, dataset, transform_set, max_images, seed, batch_size)
    m_count, count, _ = v.shape
    positive = (v[1:] * v[0].unsqueeze(0)).sum(dim=2).mean().item()

    rng = np.random.default_rng([seed, 1])
    pairs = pairs or count * m_count
    first = rng.integers(0, count, size=pairs)
    second = (first + rng.integers(1, count, size=pairs)) % count
    blocks = rng.integers(0, m_count, size=(2, pairs))
    left = v[torch.from_numpy(blocks[0]), torch.from_numpy(first)]
    right = v[torch.from_numpy(blocks[1]), torch.from_numpy(second)]
    random_pairs = (left * right).sum(dim=1).mean().item()

    gap = positive - random_pairs
    logger.debug("Invariance gap %.4f (positive %.4f, random %.4f)", gap, positive, random_pairs)
    return gap
