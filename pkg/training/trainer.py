"""Base training and successive self-distillation generations."""
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional
import logging
import os
import time

import numpy as np
import torch

from data import LabeledDataset, standard_augment
from errors import ConfigError, NumericAbortError
from losses import objective_breakdown
from memory import MemoryBank
from model import Checkpoint, EquiInvNet, init_model, load_checkpoint, save_checkpoint
from transforms import TransformSet, expand_batch
from .config import TrainConfig, lr_at, resolve_transform_set
from .metrics import MetricsLog

logger = logging.getLogger(__name__)

LOSS_KEYS = ('ce', 'eq', 'in', 'kd', 'total')


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    losses: Dict[str, float]
    wall_time: float
    steps: int


@dataclass
class TrainReport:
    generation: int
    epochs: List[EpochRecord] = field(default_factory=list)
    steps: List[dict] = field(default_factory=list)
    negatives_per_batch: int = 0
    checkpoint_path: Optional[str] = None
    evaluation: Optional[object] = None

    def mean_losses(self) -> List[float]:
        return [record.losses['total'] for record in self.epochs]


@dataclass
class GenerationResult:
    generation: int
    model: EquiInvNet
    report: Optional[TrainReport]
    checkpoint_path: Optional[str] = None


def checkpoint_path(output_dir: str, generation: int) -> str:
    return os.path.join(output_dir, f'generation_{generation}.ckpt')


def build_optimizer(model: EquiInvNet, config: TrainConfig) -> torch.optim.SGD:
    """SGD with momentum; weight decay on every parameter realizes the L2 regularizer"""
    return torch.optim.SGD(model.parameters(), lr=config.lr, momentum=config.momentum,
                           weight_decay=config.weight_decay)


def optimizer_tensors(model: EquiInvNet, optimizer: torch.optim.Optimizer) -> Dict[str, torch.Tensor]:
    tensors = {}
    for name, param in model.named_parameters():
        buffer = optimizer.state.get(param, {}).get('momentum_buffer')
        if buffer is not None:
            tensors['optim.' + name] = buffer
    return tensors


def restore_optimizer(model: EquiInvNet, optimizer: torch.optim.Optimizer, tensors: Dict[str, torch.Tensor]):
    for name, param in model.named_parameters():
        buffer = tensors.get('optim.' + name)
        if buffer is not None:
            optimizer.state[param]['momentum_buffer'] = buffer.to(param.dtype).clone()


def freeze(model: EquiInvNet) -> EquiInvNet:
    model.eval()
    model.requires_grad_(False)
    return model


def negatives_budget(config: TrainConfig, dataset_size: int) -> int:
    """Requested negatives, capped so every batch can exclude its own instances"""
    batch = min(config.batch_size, dataset_size)
    available = max(dataset_size - batch, 0)
    requested = config.loss.negatives_per_batch
    if requested > available:
        logger.warning("Dataset of %d images cannot supply %d negatives per batch of %d; using %d",
                       dataset_size, requested, batch, available)
        return available
    return requested


def _batches(order: np.ndarray, batch_size: int, limit: int) -> List[np.ndarray]:
    batches = [order[i:i + batch_size] for i in range(0, len(order), batch_size)]
    return batches[:limit] if limit else batches


def _dump_and_abort(model: EquiInvNet, output_dir: Optional[str], generation: int, step: int, record: dict):
    dump_path = None
    if output_dir:
        dump_path = os.path.join(output_dir, f'abort_generation_{generation}_step_{step}.ckpt')
        save_checkpoint(model, dump_path, generation=generation, metadata={'step': step, 'losses': record})
    logger.error("Non-finite loss at generation %d step %d: %s", generation, step, record)
    raise NumericAbortError(f"Non-finite loss at generation {generation} step {step}: {record}", dump_path)


def train_step(model: EquiInvNet, optimizer: torch.optim.Optimizer, bank: MemoryBank, images: np.ndarray,
               labels: np.ndarray, ids: np.ndarray, transform_set: TransformSet, config: TrainConfig,
               num_negatives: int, teacher: Optional[EquiInvNet] = None) -> Optional[Dict[str, float]]:
    """
    One optimization step on a batch of augmented source images.

    The batch is split into accumulation_steps chunks that are expanded and
    forwarded separately; gradients add up to the full-batch mean. Negatives
    are drawn once and shared by every chunk. The memory bank is updated
    with the identity-block projections after the parameter update.

    Returns:
        Loss record averaged over the batch, or None when the loss is non-finite
        (the parameters are then left untouched)
    """
    negatives = bank.sample_negatives(ids, num_negatives)
    chunks = [c for c in np.array_split(np.arange(len(ids)), config.accumulation_steps) if len(c)]
    param = next(model.parameters())

    optimizer.zero_grad()
    totals = dict.fromkeys(LOSS_KEYS, 0.0)
    references = []
    for chunk in chunks:
        expanded = expand_batch(images[chunk], labels[chunk], ids[chunk], transform_set, workers=config.workers)
        batch_images, class_labels, proxy_labels, _ = expanded.as_tensors(param.device, param.dtype)
        outputs = model(batch_images)
        teacher_outputs = None
        if teacher is not None:
            with torch.no_grad():
                teacher_outputs = teacher(batch_images)
        breakdown = objective_breakdown(outputs, class_labels, proxy_labels, bank.past_references(ids[chunk]),
                                        negatives, config.loss, teacher_outputs)
        if not breakdown.is_finite():
            optimizer.zero_grad()
            return None
        share = len(chunk) / len(ids)
        (breakdown.total * share).backward()
        for key, value in breakdown.to_record().items():
            totals[key] += value * share
        references.append(outputs.v[:len(chunk)].detach())

    optimizer.step()
    bank.update(ids, torch.cat(references))
    return totals


def train_generation(config: TrainConfig, dataset: LabeledDataset, teacher: Optional[EquiInvNet] = None,
                     generation: int = 0, transform_set: Optional[TransformSet] = None,
                     output_dir: Optional[str] = None, metrics: Optional[MetricsLog] = None,
                     resume: Optional[Checkpoint] = None):
    """
    Train one generation: the base learner when teacher is None, otherwise
    a freshly initialized student distilled from the frozen teacher.

    Args:
        config: training configuration
        dataset: base-training images; instance ids index the memory bank
        teacher: frozen previous-generation model (generation >= 1 only)
        generation: distillation stage index
        transform_set: transforms to expand with; resolved from config if None
        output_dir: where checkpoints go (one per epoch end, same file)
        metrics: per-step metrics log
        resume: partially trained checkpoint of this generation

    Returns:
        (model, TrainReport)
    """
    config.validate()
    if (teacher is None) != (generation == 0):
        raise ValueError(f"A teacher is required exactly for generations >= 1 (generation {generation})")
    if len(dataset) == 0:
        raise ConfigError("Training dataset is empty")
    transform_set = transform_set or resolve_transform_set(config)
    seed = config.seed + generation
    model_config = replace(config.model, num_classes=dataset.num_classes,
                           num_transforms=len(transform_set), seed=seed)
    if teacher is not None and replace(teacher.config, seed=seed) != model_config:
        raise ValueError("Teacher architecture does not match the student configuration")

    model = resume.model if resume is not None else init_model(model_config)
    model.train()
    optimizer = build_optimizer(model, config)
    bank = MemoryBank(len(dataset), model_config.invariant_dim, seed=seed)
    start_epoch = 0
    if resume is not None:
        restore_optimizer(model, optimizer, resume.tensors)
        bank.load_state_tensors(resume.tensors)
        start_epoch = resume.epoch
        logger.info("Resuming generation %d at epoch %d", generation, start_epoch)

    num_negatives = negatives_budget(config, len(dataset))
    report = TrainReport(generation=generation, negatives_per_batch=num_negatives)
    path = checkpoint_path(output_dir, generation) if output_dir else None
    step = start_epoch * len(_batches(np.arange(len(dataset)), config.batch_size, config.steps_per_epoch))

    for epoch in range(start_epoch, config.epochs):
        lr = lr_at(config, epoch)
        for group in optimizer.param_groups:
            group['lr'] = lr
        order = np.random.default_rng([config.seed, generation, epoch, 0]).permutation(len(dataset))
        aug_rng = np.random.default_rng([config.seed, generation, epoch, 1])
        started = time.perf_counter()
        sums = dict.fromkeys(LOSS_KEYS, 0.0)
        batches = _batches(order, config.batch_size, config.steps_per_epoch)

        for ids in batches:
            step_started = time.perf_counter()
            images = np.stack([standard_augment(dataset.images[i], aug_rng) for i in ids])
            record = train_step(model, optimizer, bank, images, dataset.labels[ids], ids, transform_set,
                                config, num_negatives, teacher)
            if record is None:
                _dump_and_abort(model, output_dir, generation, step, {'epoch': epoch})
            for key in LOSS_KEYS:
                sums[key] += record[key]
            step_record = {'step': step, 'epoch': epoch, 'generation': generation, 'lr': lr, **record,
                           'wall_ms': round(1000 * (time.perf_counter() - step_started), 3)}
            report.steps.append(step_record)
            if metrics:
                metrics.write(step_record)
            step += 1

        means = {key: value / len(batches) for key, value in sums.items()}
        report.epochs.append(EpochRecord(epoch, lr, means, time.perf_counter() - started, len(batches)))
        logger.info("Generation %d epoch %d: lr %.4g loss %.4f (ce %.4f eq %.4f in %.4f kd %.4f)",
                    generation, epoch, lr, means['total'], means['ce'], means['eq'], means['in'], means['kd'])
        if path:
            tensors = {**optimizer_tensors(model, optimizer), **bank.state_tensors()}
            save_checkpoint(model, path, generation=generation, epoch=epoch + 1, tensors=tensors,
                            transforms=transform_set.to_lines(),
                            metadata={'transform_name': transform_set.name, 'train_config': config.to_dict()})
            report.checkpoint_path = path

    return model, report


def checkpoint_transform_set(checkpoint: Checkpoint) -> Optional[TransformSet]:
    """The transform set recorded in a checkpoint, if any"""
    if not checkpoint.transforms:
        return None
    name = checkpoint.metadata.get('transform_name', 'checkpoint')
    return TransformSet.from_lines(name, checkpoint.transforms)


def run_pipeline(config: TrainConfig, dataset: LabeledDataset, output_dir: Optional[str] = None,
                 metrics: Optional[MetricsLog] = None, resume_from: Optional[str] = None,
                 evaluate_fn: Optional[Callable[[EquiInvNet], object]] = None) -> List[GenerationResult]:
    """
    Generation 0 without distillation, then each later generation distilled
    from the frozen previous one.

    Args:
        resume_from: checkpoint of a partially or fully trained generation g.
            Generations before g are restored from generation_<i>.ckpt in the
            same directory; g continues at its recorded epoch.
        evaluate_fn: called with each trained model; its result is stored
            in the generation's report

    Returns:
        One GenerationResult per generation
    """
    config.validate()
    transform_set = resolve_transform_set(config)
    resumed, resume_dir = None, None
    if resume_from:
        resumed = load_checkpoint(resume_from)
        resume_dir = os.path.dirname(resume_from)
        transform_set = checkpoint_transform_set(resumed) or transform_set
        if resumed.generation >= config.generations:
            raise ConfigError(f"Checkpoint generation {resumed.generation} exceeds generations={config.generations}")

    results, teacher = [], None
    for generation in range(config.generations):
        previous = None
        if resumed is not None and generation <= resumed.generation:
            previous = resumed if generation == resumed.generation else \
                load_checkpoint(checkpoint_path(resume_dir, generation))
            if previous.epoch >= config.epochs:
                logger.info("Generation %d already complete", generation)
                results.append(GenerationResult(generation, previous.model, None,
                                                checkpoint_path(resume_dir, generation)))
                teacher = freeze(previous.model)
                continue

        model, report = train_generation(config, dataset, teacher, generation, transform_set,
                                         output_dir, metrics, previous)
        if evaluate_fn is not None:
            report.evaluation = evaluate_fn(model)
        results.append(GenerationResult(generation, model, report, report.checkpoint_path))
        teacher = freeze(model)
    return results
