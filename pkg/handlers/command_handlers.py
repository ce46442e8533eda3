from typing import Any, Dict, List, Optional, Tuple
import logging
import os

import numpy as np

from constants import TRANSFORM_PRESETS
from data import (
    CIFAR_FS_MANIFEST, LabeledDataset, apply_split, class_range_manifest, load_cifar100_dir,
    load_manifest, synth_dataset
)
from errors import ConfigError
from fewshot import compute_ci95, embed_images, evaluate
from model import load_checkpoint
from run_config import RunConfig, set_key
from training import (
    MetricsLog, checkpoint_transform_set, invariance_gap, resolve_transform_set, run_pipeline,
    transform_accuracy
)
from transforms import build_preset
from .export import write_embeddings_csv, write_json, write_pca_csv, write_table

logger = logging.getLogger(__name__)

ABLATION_VARIANTS = (
    ('baseline', {'loss.w_eq': '0.0', 'loss.w_in': '0.0', 'generations': '1'}),
    ('invariance-only', {'loss.w_eq': '0.0'}),
    ('equivariance-only', {'loss.w_in': '0.0'}),
    ('full', {}),
)


def _result(body: Any, exit_code: int = 0) -> Dict[str, Any]:
    return {'exit_code': exit_code, 'body': body}


def load_splits(config: RunConfig) -> Tuple[LabeledDataset, LabeledDataset, LabeledDataset]:
    """(train, val, test) for the configured dataset; the class sets are disjoint"""
    if config.dataset == 'synthetic':
        dataset = synth_dataset(config.synth_classes, config.synth_per_class,
                                config.synth_image_size, seed=config.synth_seed)
        manifest = class_range_manifest(dataset.class_names, config.synth_train_classes, config.synth_val_classes)
    else:
        dataset = load_cifar100_dir(config.data_path)
        manifest = load_manifest(CIFAR_FS_MANIFEST)
    return apply_split(dataset, manifest)


def _evaluation_split(val: LabeledDataset, test: LabeledDataset) -> LabeledDataset:
    return val if val.num_classes else test


def _evaluate(model, dataset: LabeledDataset, config: RunConfig, k_shot: Optional[int] = None):
    n_way = min(config.n_way, dataset.num_classes)
    return evaluate(model, dataset, n_way, k_shot or config.k_shot, config.q_query,
                    config.num_tasks, seed=config.train.seed, workers=config.train.workers)


def _train(config: RunConfig, train: LabeledDataset, output_dir: Optional[str],
           evaluate_on: Optional[LabeledDataset] = None, resume_from: Optional[str] = None):
    evaluate_fn = (lambda model: _evaluate(model, evaluate_on, config)) if evaluate_on is not None else None
    metrics_path = os.path.join(output_dir, 'metrics.jsonl') if output_dir else None
    with MetricsLog(metrics_path) as metrics:
        return run_pipeline(config.train, train, output_dir, metrics, resume_from, evaluate_fn)


def handle_dump_transforms(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """
    List the transforms of a preset, one comma-separated spec per line.

    Args:
        args: Dict containing:
            - preset: String (optional), preset name, defaults to the configured one
            - out: String (optional), file to write instead of stdout
    """
    preset = args.get('preset') or config.train.transform_preset
    transform_set = build_preset(preset)
    lines = ['index,' + ','.join(('rotation', 'scale', 'aspect_ratio', 'translate_x', 'translate_y', 'shear'))]
    lines += [f'{i},{spec.to_line()}' for i, spec in enumerate(transform_set)]
    if args.get('out'):
        os.makedirs(os.path.dirname(os.path.abspath(args['out'])), exist_ok=True)
        with open(args['out'], 'w') as handle:
            handle.write('\n'.join(lines) + '\n')
    else:
        print('\n'.join(lines))
    return _result({'preset': transform_set.name, 'count': len(transform_set)})


def handle_prepare_data(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """Load the dataset, route it through the split manifest and write a split summary"""
    parts = load_splits(config)
    summary = {
        split: {'classes': part.num_classes, 'images': len(part), 'class_names': part.class_names}
        for split, part in zip(('train', 'val', 'test'), parts)
    }
    path = write_json(os.path.join(config.output_dir, 'splits.json'), summary)
    logger.info("Split summary written to %s", path)
    return _result({split: {k: v for k, v in info.items() if k != 'class_names'} for split, info in summary.items()})


def handle_train(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """
    Train generation 0 and the distilled generations; checkpoints and the
    metrics log go to the output directory.

    Args:
        args: Dict containing:
            - resume: String (optional), checkpoint to continue from
            - eval_each_generation: Boolean, evaluate every generation on the val (or test) split
    """
    train, val, test = load_splits(config)
    output_dir = config.output_dir
    os.makedirs(output_dir, exist_ok=True)
    with open(os.path.join(output_dir, 'config.txt'), 'w') as handle:
        handle.write('\n'.join(config.to_lines()) + '\n')

    evaluate_on = _evaluation_split(val, test) if args.get('eval_each_generation') else None
    results = _train(config, train, output_dir, evaluate_on, args.get('resume'))

    final = results[-1].model
    transform_set = resolve_transform_set(config.train)
    if args.get('resume'):
        transform_set = checkpoint_transform_set(load_checkpoint(args['resume'])) or transform_set
    diagnostics = {
        'transform_accuracy': transform_accuracy(final, test, transform_set, seed=config.train.seed),
        'invariance_gap': invariance_gap(final, test, transform_set, seed=config.train.seed),
    }
    logger.info("Held-out transform accuracy %.4f, invariance gap %.4f",
                diagnostics['transform_accuracy'], diagnostics['invariance_gap'])

    generations = []
    for result in results:
        entry = {'generation': result.generation, 'checkpoint': result.checkpoint_path}
        if result.report is not None and result.report.evaluation is not None:
            entry['evaluation'] = result.report.evaluation.summary()
            print(f"generation {result.generation}: {entry['evaluation']}")
        generations.append(entry)
    return _result({'generations': generations, 'diagnostics': diagnostics})


def handle_eval(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """
    Evaluate a checkpoint on the test split for every configured shot count.

    Args:
        args: Dict containing:
            - checkpoint: String, path of the checkpoint to evaluate
    """
    checkpoint = load_checkpoint(args['checkpoint'])
    _, _, test = load_splits(config)
    records = []
    for k_shot in config.shots:
        report = _evaluate(checkpoint.model, test, config, k_shot)
        record = {**report.to_record(), 'checkpoint': args['checkpoint'], 'config': config.to_lines()}
        path = os.path.join(config.output_dir, f'eval_{report.n_way}way_{k_shot}shot.json')
        write_json(path, record)
        print(f"{report.n_way}-way {k_shot}-shot: {report.summary()}")
        records.append({'k_shot': k_shot, 'summary': report.summary(), 'report': path})
    return _result(records)


def _seed_table(config: RunConfig, train, evaluate_on, variants: List[Tuple[str, Dict[str, str]]]) -> List[List[str]]:
    rows = []
    for name, overrides in variants:
        means = []
        for seed in config.ablation_seeds:
            variant = set_key(config, 'seed', str(seed))
            for key, value in overrides.items():
                variant = set_key(variant, key, value)
            variant.validate()
            results = _train(variant, train, None)
            report = _evaluate(results[-1].model, evaluate_on, variant)
            logger.info("%s seed %d: %s", name, seed, report.summary())
            means.append(report.mean)
        rows.append([name, f"{100 * np.mean(means):.2f} ± {100 * compute_ci95(means):.2f}", len(means)])
    return rows


def handle_ablate(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """Baseline, invariance-only, equivariance-only and full objectives over the configured seeds"""
    train, _, test = load_splits(config)
    rows = _seed_table(config, train, test, list(ABLATION_VARIANTS))
    header = ('variant', f'{config.n_way}-way {config.k_shot}-shot', 'seeds')
    text = write_table(os.path.join(config.output_dir, 'ablation.txt'), header, rows)
    print(text)
    return _result([{'variant': row[0], 'accuracy': row[1]} for row in rows])


def handle_sweep(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """
    Train and evaluate once per value of a single config key.

    Args:
        args: Dict containing:
            - key: String, config key to vary (e.g. transform_preset, loss.kd_temperature)
            - values: List of strings, the values to try
    """
    key, values = args.get('key'), args.get('values') or []
    if not key or not values:
        raise ConfigError("sweep requires --key and at least one value")
    if key == 'transform_preset' and any(v not in TRANSFORM_PRESETS for v in values):
        raise ConfigError(f"Unknown transform preset in {values}. Supported presets are: {', '.join(TRANSFORM_PRESETS)}")
    # validate every value before any training starts
    for value in values:
        set_key(config, key, value).validate()

    train, val, test = load_splits(config)
    evaluate_on = _evaluation_split(val, test)
    variants = [(f'{key}={value}', {key: value}) for value in values]
    rows = _seed_table(config, train, evaluate_on, variants)
    split = 'val' if evaluate_on is val else 'test'
    header = ('setting', f'{config.n_way}-way {config.k_shot}-shot ({split})', 'seeds')
    text = write_table(os.path.join(config.output_dir, f"sweep_{key.replace('.', '_')}.txt"), header, rows)
    print(text)
    return _result([{'setting': row[0], 'accuracy': row[1]} for row in rows])


def handle_embed(args: Dict[str, Any], config: RunConfig) -> Dict[str, Any]:
    """
    Export test-split embeddings and their two-component PCA projection.

    Args:
        args: Dict containing:
            - checkpoint: String, path of the checkpoint
            - out: String, CSV path for the embeddings; the projection goes next to it
            - max_images: Integer (optional), number of images sampled, defaults to 1000
    """
    checkpoint = load_checkpoint(args['checkpoint'])
    _, _, test = load_splits(config)
    count = min(args.get('max_images') or 1000, len(test))
    rng = np.random.default_rng(config.train.seed)
    chosen = np.sort(rng.choice(len(test), size=count, replace=False)) if count else np.array([], dtype=np.int64)
    embeddings = embed_images(checkpoint.model, test.images[chosen])

    out = args['out']
    rows = write_embeddings_csv(out, chosen, test.labels[chosen], embeddings)
    pca_path = os.path.splitext(out)[0] + '.pca.csv'
    ratios = write_pca_csv(pca_path, chosen, test.labels[chosen], embeddings)
    return _result({'rows': rows, 'embeddings': out, 'pca': pca_path,
                    'explained_variance': [float(r) for r in ratios]})
