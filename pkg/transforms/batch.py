from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import torch

from .geometric import apply_transform
from .transform_spec import TransformSet


@dataclass
class ExpandedBatch:
    """B source images under all M transforms, transform-major.

    Block m (rows m*B .. (m+1)*B - 1) holds every source image under
    transform m; proxy_labels of block m are all m.
    """
    images: np.ndarray          # (B*M, H, W, C) float32
    class_labels: np.ndarray    # (B*M,) int64
    proxy_labels: np.ndarray    # (B*M,) int64
    instance_ids: np.ndarray    # (B*M,) int64
    num_transforms: int

    @property
    def batch_size(self) -> int:
        return len(self.images) // self.num_transforms

    def as_tensors(self, device='cpu', dtype=torch.float32):
        """Images as an NCHW tensor plus the three label tensors"""
        images = torch.from_numpy(np.ascontiguousarray(self.images.transpose(0, 3, 1, 2)))
        return (
            images.to(device=device, dtype=dtype),
            torch.from_numpy(self.class_labels).to(device),
            torch.from_numpy(self.proxy_labels).to(device),
            torch.from_numpy(self.instance_ids).to(device),
        )


def expand_batch(images: np.ndarray, labels, instance_ids, transform_set: TransformSet,
                 workers: int = 1) -> ExpandedBatch:
    """
    Apply every transform of the set to every image of the batch.

    Args:
        images: (B, H, W, C) float array, B >= 1
        labels: B class indices
        instance_ids: B dataset-global indices
        transform_set: the M transforms
        workers: threads used for warping; output does not depend on it

    Returns:
        ExpandedBatch with B*M rows in transform-major order
    """
    images = np.asarray(images, dtype=np.float32)
    labels = np.asarray(labels, dtype=np.int64)
    instance_ids = np.asarray(instance_ids, dtype=np.int64)
    batch = len(images)
    if batch < 1:
        raise ValueError("Cannot expand an empty batch")
    if len(labels) != batch or len(instance_ids) != batch:
        raise ValueError(
            f"images, labels and instance_ids disagree in length: {batch}, {len(labels)}, {len(instance_ids)}"
        )

    m_count = len(transform_set)
    out = np.empty((batch * m_count,) + images.shape[1:], dtype=np.float32)

    def fill(m: int):
        spec = transform_set[m]
        for b in range(batch):
            out[m * batch + b] = apply_transform(images[b], spec)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(m_count)))
    else:
        for m in range(m_count):
            fill(m)

    return ExpandedBatch(
        images=out,
        class_labels=np.tile(labels, m_count),
        proxy_labels=np.repeat(np.arange(m_count, dtype=np.int64), batch),
        instance_ids=np.tile(instance_ids, m_count),
        num_transforms=m_count,
    )
