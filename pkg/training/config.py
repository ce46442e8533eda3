from dataclasses import dataclass, field, asdict, replace
from typing import Tuple
import logging

import numpy as np

from constants import (
    AFFINE_SUBSET_SIZE, BATCH_SIZE, DEFAULT_TRANSFORM_PRESET, LEARNING_RATE, LR_DECAY_FACTOR,
    SGD_MOMENTUM, TRANSFORM_PRESETS, WEIGHT_DECAY
)
from errors import ConfigError
from losses import LossConfig
from model import ModelConfig
from transforms import TransformSet, build_preset, sample_affine_subset

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = BATCH_SIZE
    lr: float = LEARNING_RATE
    momentum: float = SGD_MOMENTUM
    weight_decay: float = WEIGHT_DECAY
    lr_decay_epochs: Tuple[int, ...] = (25,)
    lr_decay_factor: float = LR_DECAY_FACTOR
    generations: int = 2
    seed: int = 0
    transform_preset: str = DEFAULT_TRANSFORM_PRESET
    transform_subset: int = AFFINE_SUBSET_SIZE
    accumulation_steps: int = 1
    workers: int = 1
    steps_per_epoch: int = 0  # 0 runs a full pass over the dataset
    loss: LossConfig = field(default_factory=LossConfig)
    model: ModelConfig = field(default_factory=ModelConfig)

    def validate(self) -> 'TrainConfig':
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.lr < 0 or self.weight_decay < 0:
            raise ConfigError(f"lr and weight_decay must be >= 0, got {self.lr}, {self.weight_decay}")
        if self.lr_decay_factor <= 0:
            raise ConfigError(f"lr_decay_factor must be positive, got {self.lr_decay_factor}")
        decays = list(self.lr_decay_epochs)
        if any(b <= a for a, b in zip(decays, decays[1:])) or any(e < 0 or e >= self.epochs for e in decays):
            raise ConfigError(f"lr_decay_epochs must be strictly increasing within [0, {self.epochs}), got {decays}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if self.transform_preset not in TRANSFORM_PRESETS:
            raise ConfigError(
                f"Unknown transform preset: {self.transform_preset}. "
                f"Supported presets are: {', '.join(TRANSFORM_PRESETS)}"
            )
        if self.transform_subset < 2:
            raise ConfigError(f"transform_subset must be >= 2, got {self.transform_subset}")
        if not 1 <= self.accumulation_steps <= self.batch_size:
            raise ConfigError(f"accumulation_steps must lie in [1, batch_size], got {self.accumulation_steps}")
        if self.workers < 1 or self.steps_per_epoch < 0:
            raise ConfigError(f"workers must be >= 1 and steps_per_epoch >= 0")
        self.loss.validate()
        self.model.validate()
        return self

    def to_dict(self) -> dict:
        values = asdict(self)
        values['lr_decay_epochs'] = list(self.lr_decay_epochs)
        return values


RECIPES = {
    'desk': {},
    'cifar-fs': {'epochs': 65, 'lr_decay_epochs': (60,)},
    'tiered': {'epochs': 60, 'lr_decay_epochs': (30, 40, 50)},
    'meta-dataset': {'epochs': 90, 'lr': 0.1, 'weight_decay': 1e-4, 'batch_size': 256,
                     'lr_decay_epochs': (30, 60)},
}


def recipe(name: str) -> TrainConfig:
    """Training config for a named schedule"""
    if name not in RECIPES:
        raise ConfigError(f"Unknown recipe: {name}. Supported recipes are: {', '.join(RECIPES)}")
    return replace(TrainConfig(), **RECIPES[name])


def lr_at(config: TrainConfig, epoch: int) -> float:
    """Initial lr times decay_factor for every decay epoch already reached"""
    if not 0 <= epoch < config.epochs:
        raise ValueError(f"epoch {epoch} outside [0, {config.epochs})")
    passed = sum(1 for e in config.lr_decay_epochs if e <= epoch)
    return config.lr * config.lr_decay_factor ** passed


def resolve_transform_set(config: TrainConfig) -> TransformSet:
    """The preset, or a seeded random subset of it for affine972"""
    transform_set = build_preset(config.transform_preset)
    if config.transform_preset == 'affine972':
        transform_set = sample_affine_subset(transform_set, config.transform_subset,
                                             np.random.default_rng(config.seed))
        logger.info("Training on %d transforms sampled from affine972", len(transform_set))
    return transform_set
