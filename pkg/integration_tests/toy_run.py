"""Shared desk-scale setup for the end-to-end runs."""
from typing import List

from fewshot import evaluate
from handlers.command_handlers import load_splits
from run_config import RunConfig, parse_lines

TOY_RUN = [
    'synth_classes=16', 'synth_per_class=60', 'synth_image_size=32', 'synth_train_classes=10',
    'epochs=8', 'lr_decay_epochs=6', 'batch_size=64', 'transform_preset=m16',
    'loss.negatives_per_batch=512', 'n_way=5', 'shots=1', 'num_tasks=200',
]


def toy_config(*lines: str) -> RunConfig:
    return parse_lines(TOY_RUN + list(lines))


def toy_splits(config: RunConfig):
    return load_splits(config)


def evaluate_toy(model, dataset, config: RunConfig):
    return evaluate(model, dataset, config.n_way, config.k_shot, config.q_query, config.num_tasks,
                    seed=config.train.seed)


def mean_accuracy(reports: List) -> float:
    return sum(report.mean for report in reports) / len(reports)
