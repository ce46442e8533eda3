from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
import torch

from errors import DataFormatError


@dataclass
class LabeledDataset:
    """Immutable image collection; instance_ids is always 0..N-1"""
    images: np.ndarray              # N x H x W x C uint8
    labels: np.ndarray              # N class indices
    class_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.class_names = list(self.class_names)
        if self.images.ndim != 4:
            raise DataFormatError(f"Expected N x H x W x C images, got shape {self.images.shape}")
        if len(self.images) != len(self.labels):
            raise DataFormatError(f"{len(self.images)} images but {len(self.labels)} labels")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= len(self.class_names)):
            raise DataFormatError(f"Labels must lie in [0, {len(self.class_names)})")

    def __len__(self) -> int:
        return len(self.images)

    @property
    def instance_ids(self) -> np.ndarray:
        return np.arange(len(self.images), dtype=np.int64)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def image_shape(self):
        return self.images.shape[1:]

    def indices_by_class(self) -> List[np.ndarray]:
        return [np.flatnonzero(self.labels == c) for c in range(self.num_classes)]

    def subset(self, indices: Sequence[int]) -> 'LabeledDataset':
        """Images at the given indices; ids are re-based, class list kept"""
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.images[indices], self.labels[indices], self.class_names)


def images_to_tensor(images: np.ndarray, dtype=torch.float32) -> torch.Tensor:
    """N x H x W x C array (uint8 or [0, 1] float) to an N x C x H x W tensor in [0, 1]"""
    images = np.asarray(images)
    if images.dtype == np.uint8:
        images = images.astype(np.float32) / 255.0
    return torch.from_numpy(np.ascontiguousarray(images.transpose(0, 3, 1, 2))).to(dtype)
