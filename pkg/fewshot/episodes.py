from dataclasses import dataclass
from typing import Dict

import numpy as np

from data import LabeledDataset


@dataclass
class Episode:
    """One N-way K-shot task. Indices point into the evaluation dataset; labels are episode labels 0..N-1."""
    support_indices: np.ndarray
    support_labels: np.ndarray
    query_indices: np.ndarray
    query_labels: np.ndarray
    class_map: Dict[int, int]       # dataset class -> episode label
    support_images: np.ndarray
    query_images: np.ndarray

    @property
    def n_way(self) -> int:
        return len(self.class_map)


def sample_episode(dataset: LabeledDataset, n_way: int, k_shot: int, q_query: int,
                   rng: np.random.Generator, by_class=None) -> Episode:
    """
    Draw n_way classes without replacement, then k_shot + q_query images per
    class without replacement; the first k_shot of each class form the support.

    Args:
        by_class: precomputed dataset.indices_by_class(), reused across episodes
    """
    if n_way < 2:
        raise ValueError(f"n_way must be >= 2, got {n_way}")
    if k_shot < 1 or q_query < 1:
        raise ValueError(f"k_shot and q_query must be >= 1, got {k_shot}, {q_query}")
    by_class = by_class if by_class is not None else dataset.indices_by_class()
    eligible = [c for c, members in enumerate(by_class) if len(members) >= k_shot + q_query]
    if len(eligible) < n_way:
        raise ValueError(
            f"Need {n_way} classes with at least {k_shot + q_query} images each, found {len(eligible)}"
        )

    classes = rng.choice(eligible, size=n_way, replace=False)
    support, query = [], []
    for members in (by_class[c] for c in classes):
        picked = rng.choice(members, size=k_shot + q_query, replace=False)
        support.append(picked[:k_shot])
        query.append(picked[k_shot:])

    support_indices = np.concatenate(support)
    query_indices = np.concatenate(query)
    return Episode(
        support_indices=support_indices,
        support_labels=np.repeat(np.arange(n_way), k_shot),
        query_indices=query_indices,
        query_labels=np.repeat(np.arange(n_way), q_query),
        class_map={int(c): label for label, c in enumerate(classes)},
        support_images=dataset.images[support_indices],
        query_images=dataset.images[query_indices],
    )
