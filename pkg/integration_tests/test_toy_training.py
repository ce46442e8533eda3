import sys
import os
import pytest
import logging
# Add project root to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from integration_tests.toy_run import evaluate_toy, toy_config, toy_splits
from training import resolve_transform_set, run_pipeline, train_generation, invariance_gap, transform_accuracy

# Set up logging
logger = logging.getLogger(__name__)

SEEDS = (0, 1, 2)


@pytest.fixture(scope='module')
def splits():
    return toy_splits(toy_config())


def test_loss_decreases_across_epochs(splits):
    """Epoch-mean training loss trends down on every seed"""
    train, _, _ = splits
    for seed in SEEDS:
        config = toy_config(f'seed={seed}', 'epochs=5', 'lr_decay_epochs=4')
        _, report = train_generation(config.train, train)
        losses = report.mean_losses()
        logger.info("Seed %d epoch losses: %s", seed, [round(l, 4) for l in losses])
        steps = [b - a for a, b in zip(losses, losses[1:])]
        assert losses[-1] < losses[0]
        assert sum(steps) / len(steps) < 0


def test_heads_learn_held_out_structure(splits, caplog):
    """The equivariance head recognizes transforms and v separates instances on unseen classes"""
    caplog.set_level(logging.INFO)
    train, _, test = splits
    config = toy_config()
    model, _ = train_generation(config.train, train)
    transform_set = resolve_transform_set(config.train)

    accuracy = transform_accuracy(model, test, transform_set)
    gap = invariance_gap(model, test, transform_set)
    logger.info("Held-out transform accuracy %.4f (chance %.4f), invariance gap %.4f",
                accuracy, 1 / len(transform_set), gap)

    assert accuracy > 0.60
    assert gap >= 0.2


def test_distillation_does_not_degrade(splits):
    """One distillation stage keeps few-shot accuracy within half a point of generation 0"""
    train, _, test = splits
    for seed in SEEDS:
        config = toy_config(f'seed={seed}', 'generations=2')
        results = run_pipeline(config.train, train, evaluate_fn=lambda model: evaluate_toy(model, test, config))
        base, student = (r.report.evaluation.mean for r in results)
        logger.info("Seed %d: generation 0 %.4f, generation 1 %.4f", seed, base, student)
        assert student >= base - 0.005


def test_pipeline_is_deterministic(splits):
    """Train, distill and evaluate twice with one seed: identical reports"""
    train, _, test = splits
    config = toy_config('seed=5', 'generations=2', 'epochs=3', 'lr_decay_epochs=2', 'num_tasks=50')

    def full_run():
        results = run_pipeline(config.train, train)
        return evaluate_toy(results[-1].model, test, config)

    first, second = full_run(), full_run()
    assert first.accuracies == second.accuracies
    assert first.summary() == second.summary()
