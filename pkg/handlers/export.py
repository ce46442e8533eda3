"""Files written by the command handlers: embedding tables, PCA projections, reports."""
from typing import Dict, List, Sequence
import csv
import json
import logging
import os

import numpy as np
from sklearn.decomposition import PCA

logger = logging.getLogger(__name__)


def _ensure_parent(path: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)


def write_embeddings_csv(path: str, instance_ids: Sequence[int], labels: Sequence[int],
                         embeddings: np.ndarray) -> int:
    """
    One row per image: instance_id, label, then the embedding values.

    Returns:
        Number of data rows written; an empty input gives a header-only file
    """
    embeddings = np.asarray(embeddings)
    dim = embeddings.shape[1] if embeddings.ndim == 2 else 0
    _ensure_parent(path)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['instance_id', 'label'] + [f'e{i}' for i in range(dim)])
        for instance_id, label, row in zip(instance_ids, labels, embeddings):
            writer.writerow([int(instance_id), int(label)] + [repr(float(x)) for x in row])
    logger.info("Wrote %d embeddings to %s", len(embeddings), path)
    return len(embeddings)


def pca_projection(embeddings: np.ndarray, n_components: int = 2):
    """
    Project onto the leading principal components.

    Returns:
        (projection N x n_components, explained variance ratios); fewer
        than two samples give an empty projection
    """
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if len(embeddings) < 2:
        return np.zeros((len(embeddings), n_components)), np.zeros(n_components)
    components = min(n_components, *embeddings.shape)
    pca = PCA(n_components=components, svd_solver='full')
    projection = pca.fit_transform(embeddings)
    ratios = pca.explained_variance_ratio_
    if components < n_components:
        projection = np.pad(projection, ((0, 0), (0, n_components - components)))
        ratios = np.pad(ratios, (0, n_components - components))
    return projection, ratios


def write_pca_csv(path: str, instance_ids: Sequence[int], labels: Sequence[int], embeddings: np.ndarray) -> np.ndarray:
    """Two-component projection table (instance_id, label, pc1, pc2); returns the explained variance ratios"""
    projection, ratios = pca_projection(embeddings)
    _ensure_parent(path)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['instance_id', 'label', 'pc1', 'pc2'])
        if len(instance_ids) >= 2:
            for instance_id, label, (pc1, pc2) in zip(instance_ids, labels, projection):
                writer.writerow([int(instance_id), int(label), repr(float(pc1)), repr(float(pc2))])
    logger.info("Wrote PCA projection to %s (explained variance %s)", path, np.round(ratios, 4).tolist())
    return ratios


def write_json(path: str, record: Dict) -> str:
    _ensure_parent(path)
    tmp_path = path + '.tmp'
    with open(tmp_path, 'w') as handle:
        json.dump(record, handle, indent=2)
    os.replace(tmp_path, path)
    return path


def format_table(header: Sequence[str], rows: List[Sequence[str]]) -> str:
    """Plain-text table with padded columns"""
    cells = [list(map(str, header))] + [list(map(str, row)) for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ['  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, '  '.join('-' * width for width in widths))
    return '\n'.join(lines)


def write_table(path: str, header: Sequence[str], rows: List[Sequence[str]]) -> str:
    text = format_table(header, rows)
    _ensure_parent(path)
    with open(path, 'w') as handle:
        handle.write(text + '\n')
    return text
