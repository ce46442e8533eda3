"""Logistic-regression evaluation of frozen embeddings on sampled episodes."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Sequence
import logging

import numpy as np
import torch
from sklearn.linear_model import LogisticRegression
from sklearn.preprocessing import normalize

from constants import CI95_Z, LOGREG_C, LOGREG_MAX_ITER, LOGREG_TOL, NUM_TASKS, QUERY_PER_CLASS
from data import LabeledDataset, images_to_tensor
from .episodes import Episode, sample_episode

logger = logging.getLogger(__name__)

EMBED_BATCH = 256


@dataclass
class LinearClassifier:
    model: LogisticRegression
    degenerate: bool = False

    def predict(self, embeddings: np.ndarray) -> np.ndarray:
        return self.model.predict(normalize(embeddings))


@dataclass
class EvalReport:
    accuracies: List[float]
    n_way: int
    k_shot: int
    q_query: int
    seed: int
    degenerate_episodes: int = 0
    mean: float = field(init=False)
    ci95: float = field(init=False)

    def __post_init__(self):
        self.accuracies = [float(a) for a in self.accuracies]
        self.mean = float(np.mean(self.accuracies)) if self.accuracies else 0.0
        self.ci95 = compute_ci95(self.accuracies)

    @property
    def num_tasks(self) -> int:
        return len(self.accuracies)

    def summary(self) -> str:
        return f"{100 * self.mean:.2f} ± {100 * self.ci95:.2f}"

    def to_record(self) -> dict:
        return {
            'mean': self.mean,
            'ci95': self.ci95,
            'summary': self.summary(),
            'n_way': self.n_way,
            'k_shot': self.k_shot,
            'q_query': self.q_query,
            'num_tasks': self.num_tasks,
            'seed': self.seed,
            'degenerate_episodes': self.degenerate_episodes,
            'accuracies': self.accuracies,
        }


def compute_ci95(accuracies: Sequence[float]) -> float:
    """1.96 * sample std (n - 1) / sqrt(n); 0 for fewer than two values"""
    if len(accuracies) < 2:
        return 0.0
    return float(CI95_Z * np.std(accuracies, ddof=1) / np.sqrt(len(accuracies)))


def fit_linear_classifier(embeddings: np.ndarray, labels: np.ndarray) -> LinearClassifier:
    """
    L2-regularized multinomial logistic regression on L2-normalized embeddings,
    minimizing mean NLL + ||W||^2 / (2 * LOGREG_C) with an unpenalized intercept.

    Support sets whose embeddings are all identical still get a classifier;
    it is marked degenerate.
    """
    embeddings = normalize(np.asarray(embeddings, dtype=np.float64))
    labels = np.asarray(labels)
    if len(np.unique(labels)) < 2:
        raise ValueError("Support set must contain at least two classes")
    degenerate = bool(np.all(np.ptp(embeddings, axis=0) == 0))
    if degenerate:
        logger.warning("All %d support embeddings are identical", len(embeddings))
    # sklearn's C weights the summed log-likelihood; LOGREG_C is on the mean
    model = LogisticRegression(C=LOGREG_C / len(embeddings), tol=LOGREG_TOL, max_iter=LOGREG_MAX_ITER)
    model.fit(embeddings, labels)
    return LinearClassifier(model, degenerate)


def embed_images(model, images: np.ndarray, batch_size: int = EMBED_BATCH) -> np.ndarray:
    """Backbone embeddings of uint8 N x H x W x C images, computed in batches"""
    chunks = [model.embed(images_to_tensor(images[i:i + batch_size]))
              for i in range(0, len(images), batch_size)]
    if not chunks:
        return model.embed(images_to_tensor(images)).double().numpy()
    return torch.cat(chunks).double().numpy()


def _score(support: np.ndarray, support_labels: np.ndarray, query: np.ndarray, query_labels: np.ndarray):
    classifier = fit_linear_classifier(support, support_labels)
    accuracy = float(np.mean(classifier.predict(query) == query_labels))
    return accuracy, classifier.degenerate


def evaluate_episode(model, episode: Episode) -> float:
    """Query accuracy of a classifier fit on the episode's support embeddings"""
    if len(episode.query_labels) == 0:
        raise ValueError("Episode has no query images")
    support = embed_images(model, episode.support_images)
    query = embed_images(model, episode.query_images)
    accuracy, _ = _score(support, episode.support_labels, query, episode.query_labels)
    return accuracy


def evaluate(model, dataset: LabeledDataset, n_way: int, k_shot: int, q_query: int = QUERY_PER_CLASS,
             num_tasks: int = NUM_TASKS, seed: int = 0, workers: int = 1) -> EvalReport:
    """
    Mean query accuracy and 95% interval over num_tasks episodes.

    The dataset is embedded once. Episode i draws from its own stream seeded
    with (seed, i), so results do not depend on workers.
    """
    if num_tasks < 1:
        raise ValueError(f"num_tasks must be >= 1, got {num_tasks}")
    embeddings = embed_images(model, dataset.images)
    by_class = dataset.indices_by_class()

    def run(index: int):
        episode = sample_episode(dataset, n_way, k_shot, q_query, np.random.default_rng([seed, index]), by_class)
        return _score(embeddings[episode.support_indices], episode.support_labels,
                      embeddings[episode.query_indices], episode.query_labels)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(num_tasks)))
    else:
        results = [run(i) for i in range(num_tasks)]

    report = EvalReport(
        accuracies=[accuracy for accuracy, _ in results],
        n_way=n_way, k_shot=k_shot, q_query=q_query, seed=seed,
        degenerate_episodes=sum(1 for _, degenerate in results if degenerate),
    )
    logger.info("%d-way %d-shot over %d episodes: %s", n_way, k_shot, num_tasks, report.summary())
    return report
