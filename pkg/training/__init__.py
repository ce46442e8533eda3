from .config import TrainConfig, RECIPES, recipe, lr_at, resolve_transform_set
from .metrics import MetricsLog
from .trainer import (
    EpochRecord,
    TrainReport,
    GenerationResult,
    build_optimizer,
    checkpoint_path,
    checkpoint_transform_set,
    freeze,
    negatives_budget,
    train_step,
    train_generation,
    run_pipeline
)
from .diagnostics import transform_accuracy, invariance_gap

__all__ = [
    'TrainConfig',
    'RECIPES',
    'recipe',
    'lr_at',
    'resolve_transform_set',
    'MetricsLog',
    'EpochRecord',
    'TrainReport',
    'GenerationResult',
    'build_optimizer',
    'checkpoint_path',
    'checkpoint_transform_set',
    'freeze',
    'negatives_budget',
    'train_step',
    'train_generation',
    'run_pipeline',
    'transform_accuracy',
    'invariance_gap'
]
