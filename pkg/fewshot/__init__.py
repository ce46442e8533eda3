from .episodes import Episode, sample_episode
from .evaluation import (
    LinearClassifier,
    EvalReport,
    compute_ci95,
    fit_linear_classifier,
    embed_images,
    evaluate_episode,
    evaluate
)

__all__ = [
    'Episode',
    'sample_episode',
    'LinearClassifier',
    'EvalReport',
    'compute_ci95',
    'fit_linear_classifier',
    'embed_images',
    'evaluate_episode',
    'evaluate'
]
