"""Run configuration: flat ``key=value`` files with ``--set`` overrides.

Training keys are top level (``epochs=30``); model and loss keys are dotted
(``model.backbone=conv4``, ``loss.w_eq=0.0``). ``recipe`` is applied first,
then every other key in order, so explicit keys win over the recipe.
"""
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Iterable, List, Optional, Tuple, Union, get_args, get_origin, get_type_hints
import copy
import logging

from constants import NUM_TASKS, QUERY_PER_CLASS
from errors import ConfigError
from losses import LossConfig
from model import ModelConfig
from training import RECIPES, TrainConfig, recipe

logger = logging.getLogger(__name__)

DATASETS = ('synthetic', 'cifar-fs')
# Filled in from the data and the transform set at training time
DERIVED_KEYS = ('model.num_classes', 'model.num_transforms', 'model.seed')


@dataclass
class RunConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    recipe: str = 'desk'
    dataset: str = 'synthetic'
    data_path: str = ''
    output_dir: str = 'runs'
    n_way: int = 5
    shots: Tuple[int, ...] = (1,)
    q_query: int = QUERY_PER_CLASS
    num_tasks: int = NUM_TASKS
    synth_classes: int = 16
    synth_per_class: int = 100
    synth_image_size: int = 32
    synth_train_classes: int = 10
    synth_val_classes: int = 0
    synth_seed: int = 0
    ablation_seeds: Tuple[int, ...] = (0, 1, 2)

    @property
    def k_shot(self) -> int:
        return self.shots[0]

    def validate(self) -> 'RunConfig':
        self.train.validate()
        if self.recipe not in RECIPES:
            raise ConfigError(f"Unknown recipe: {self.recipe}. Supported recipes are: {', '.join(RECIPES)}")
        if self.dataset not in DATASETS:
            raise ConfigError(f"Unknown dataset: {self.dataset}. Supported datasets are: {', '.join(DATASETS)}")
        if self.dataset == 'cifar-fs' and not self.data_path:
            raise ConfigError("dataset=cifar-fs requires data_path")
        if self.n_way < 2:
            raise ConfigError(f"n_way must be >= 2, got {self.n_way}")
        if not self.shots or min(self.shots) < 1:
            raise ConfigError(f"shots must be a non-empty list of values >= 1, got {self.shots}")
        if self.q_query < 1 or self.num_tasks < 1:
            raise ConfigError(f"q_query and num_tasks must be >= 1, got {self.q_query}, {self.num_tasks}")
        if not self.ablation_seeds:
            raise ConfigError("ablation_seeds must not be empty")
        if self.dataset == 'synthetic':
            test_classes = self.synth_classes - self.synth_train_classes - self.synth_val_classes
            if self.synth_train_classes < 2 or self.synth_val_classes < 0 or test_classes < self.n_way:
                raise ConfigError(
                    f"synthetic split {self.synth_train_classes}/{self.synth_val_classes}/{test_classes} "
                    f"needs >= 2 train classes and >= n_way={self.n_way} test classes"
                )
            if self.synth_per_class < max(self.shots) + self.q_query:
                raise ConfigError(f"synth_per_class must be >= max(shots) + q_query")
        return self

    def to_lines(self) -> List[str]:
        """Every key with its effective value; parse_lines() rebuilds an equal config"""
        lines = [f'recipe={self.recipe}']
        lines += [f'{key}={format_value(get_key(self, key))}' for key in config_keys() if key != 'recipe']
        return lines


def _section_keys(cls, prefix: str, skip: Iterable[str] = ()) -> List[str]:
    return [prefix + f.name for f in fields(cls) if f.name not in skip]


def config_keys() -> List[str]:
    keys = _section_keys(RunConfig, '', skip=('train',))
    keys += _section_keys(TrainConfig, '', skip=('loss', 'model'))
    keys += _section_keys(LossConfig, 'loss.')
    keys += [key for key in _section_keys(ModelConfig, 'model.') if key not in DERIVED_KEYS]
    return keys


def _locate(config: RunConfig, key: str):
    """(owner object, attribute name) for a config key"""
    if key in DERIVED_KEYS:
        raise ConfigError(f"{key} is derived from the data and cannot be set")
    if key not in config_keys():
        raise ConfigError(f"Unknown config key: {key}")
    if key.startswith('loss.'):
        return config.train.loss, key[len('loss.'):]
    if key.startswith('model.'):
        return config.train.model, key[len('model.'):]
    if key in {f.name for f in fields(RunConfig)}:
        return config, key
    return config.train, key


def get_key(config: RunConfig, key: str):
    owner, name = _locate(config, key)
    return getattr(owner, name)


def parse_value(text: str, hint, key: str = ''):
    text = text.strip()
    origin = get_origin(hint)
    try:
        if origin is Union:
            inner = [arg for arg in get_args(hint) if arg is not type(None)][0]
            return None if text.lower() in ('', 'none') else parse_value(text, inner, key)
        if origin in (tuple, Tuple):
            item = get_args(hint)[0]
            return tuple(parse_value(part, item, key) for part in text.split(',') if part.strip())
        if hint is bool:
            if text.lower() not in ('true', 'false', '1', '0', 'yes', 'no'):
                raise ValueError(text)
            return text.lower() in ('true', '1', 'yes')
        if hint in (int, float, str):
            return hint(text)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid value for {key}: '{text}'")
    raise ConfigError(f"Unsupported config type for {key}: {hint}")


def format_value(value) -> str:
    if value is None:
        return 'none'
    if isinstance(value, (tuple, list)):
        return ','.join(format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def set_key(config: RunConfig, key: str, text: str) -> RunConfig:
    """A copy of config with one key parsed from text"""
    config = copy.deepcopy(config)
    owner, name = _locate(config, key)
    setattr(owner, name, parse_value(text, get_type_hints(type(owner))[name], key))
    return config


def parse_pairs(lines: Iterable[str], source: str = '<config>') -> List[Tuple[str, str]]:
    """key=value pairs from text lines; blank lines and # comments are skipped"""
    pairs = []
    for number, line in enumerate(lines, 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got '{line}'")
        key, value = line.split('=', 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def from_pairs(pairs: List[Tuple[str, str]], base: Optional[RunConfig] = None) -> RunConfig:
    """
    Apply key=value pairs on top of base (defaults if None).

    The last ``recipe`` among the pairs resets the training section to that
    recipe before any other key is applied.
    """
    config = copy.deepcopy(base) if base is not None else RunConfig()
    recipes = [value for key, value in pairs if key == 'recipe']
    if recipes:
        name = recipes[-1]
        schedule = recipe(name)
        config.recipe = name
        config.train = replace(schedule, loss=config.train.loss, model=config.train.model)
    for key, value in pairs:
        if key != 'recipe':
            config = set_key(config, key, value)
    if not any(key == 'lr_decay_epochs' for key, _ in pairs):
        config.train = fit_decay_to_epochs(config.train, recipe(config.recipe).epochs)
    return config


def fit_decay_to_epochs(train: TrainConfig, recipe_epochs: int) -> TrainConfig:
    """
    Scale recipe decay points onto a shorter epoch count.

    Only applies when some decay point no longer lies inside the schedule;
    points land at floor(e * epochs / recipe_epochs) and must stay in [1, epochs).
    """
    if all(e < train.epochs for e in train.lr_decay_epochs):
        return train
    scaled = sorted({e * train.epochs // recipe_epochs for e in train.lr_decay_epochs})
    decays = tuple(e for e in scaled if 1 <= e < train.epochs)
    logger.info("Decay epochs %s rescaled to %s for %d epochs", list(train.lr_decay_epochs), list(decays), train.epochs)
    return replace(train, lr_decay_epochs=decays)


def parse_lines(lines: Iterable[str]) -> RunConfig:
    return from_pairs(parse_pairs(lines)).validate()


def read_config_file(path: str) -> List[Tuple[str, str]]:
    try:
        with open(path) as handle:
            return parse_pairs(handle, path)
    except OSError as error:
        raise ConfigError(f"Cannot read config file {path}: {error}")


def load_run_config(path: Optional[str] = None, overrides: Iterable[str] = (),
                    flags: Optional[Dict[str, str]] = None) -> RunConfig:
    """
    Effective configuration: defaults, then the file, then --set overrides,
    then dedicated command-line flags.
    """
    pairs = read_config_file(path) if path else []
    pairs += parse_pairs(overrides, '--set')
    pairs += [(key, value) for key, value in (flags or {}).items() if value is not None]
    config = from_pairs(pairs).validate()
    logger.debug("Effective config: %s", '; '.join(config.to_lines()))
    return config
