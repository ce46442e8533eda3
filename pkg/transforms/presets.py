"""Named transform families and random subsets of the affine grid."""
from itertools import product
from typing import Iterable, List
import logging

import numpy as np

from constants import TRANSFORM_PRESETS
from errors import ConfigError
from .transform_spec import TransformSet, TransformSpec, IDENTITY

logger = logging.getLogger(__name__)

# Neutral value first on every axis so products start at the identity
ROTATIONS = (0, 1, 2, 3)
ASPECT_RATIOS = (1.0, 0.67, 1.33)
SCALES = (1.0, 0.67)

AFFINE_TRANSLATIONS = (0.0, -0.2, 0.2)
AFFINE_SCALES = (1.0, 0.67, 1.33)
AFFINE_SHEARS = (0.0, -20.0, 20.0)


def _ar_rot(aspect_ratios=ASPECT_RATIOS) -> List[TransformSpec]:
    return [TransformSpec(rotation=r, aspect_ratio=a) for a, r in product(aspect_ratios, ROTATIONS)]


def _rot_scale(scales: Iterable[float], aspect_ratios=(1.0,)) -> List[TransformSpec]:
    return [TransformSpec(rotation=r, scale=s, aspect_ratio=a)
            for s, a, r in product(scales, aspect_ratios, ROTATIONS)]


def _union(*groups: List[TransformSpec]) -> List[TransformSpec]:
    seen = {}
    for group in groups:
        for spec in group:
            seen.setdefault(spec, None)
    return list(seen)


def _affine_grid() -> List[TransformSpec]:
    return [
        TransformSpec(rotation=r, translate_x=tx, translate_y=ty, scale=s, aspect_ratio=a, shear=sh)
        for r, tx, ty, s, a, sh in product(
            ROTATIONS, AFFINE_TRANSLATIONS, AFFINE_TRANSLATIONS, AFFINE_SCALES, ASPECT_RATIOS, AFFINE_SHEARS
        )
    ]


_PRESET_BUILDERS = {
    'm3': lambda: [TransformSpec(aspect_ratio=a) for a in ASPECT_RATIOS],
    'm4': lambda: [TransformSpec(rotation=r) for r in ROTATIONS],
    'm8': lambda: _rot_scale(SCALES),
    'm12': lambda: _ar_rot(),
    'm16': lambda: _union(_ar_rot(), _rot_scale((0.67,))),
    'm20': lambda: _union(_ar_rot(), _rot_scale((0.67,), aspect_ratios=(0.67, 1.33))),
    'm24': lambda: [TransformSpec(rotation=r, scale=s, aspect_ratio=a)
                    for a, r, s in product(ASPECT_RATIOS, ROTATIONS, SCALES)],
    'affine972': _affine_grid,
}


def build_preset(name: str) -> TransformSet:
    """
    Build one of the named transform families.

    Args:
        name: preset identifier, case-insensitive (m3, m4, m8, m12, m16, m20, m24, affine972)

    Returns:
        TransformSet with the identity transform at index 0
    """
    key = name.lower() if isinstance(name, str) else name
    builder = _PRESET_BUILDERS.get(key)
    if builder is None:
        raise ConfigError(
            f"Unknown transform preset: {name}. "
            f"Supported presets are: {', '.join(TRANSFORM_PRESETS)}"
        )
    return TransformSet(name=key, specs=builder())


def sample_affine_subset(full: TransformSet, k: int, rng: np.random.Generator) -> TransformSet:
    """
    Draw k distinct transforms uniformly without replacement, identity first.

    The drawn transforms keep their order in ``full``, so k == len(full)
    returns the full set unchanged.
    """
    if k < 2:
        raise ValueError(f"Subset size must be at least 2, got {k}")
    if k > len(full):
        raise ValueError(f"Subset size {k} exceeds transform set size {len(full)}")

    others = [spec for spec in full if spec != IDENTITY]
    picks = np.sort(rng.choice(len(others), size=k - 1, replace=False))
    specs = [IDENTITY] + [others[i] for i in picks]
    logger.debug("Sampled %d transforms from '%s'", k, full.name)
    return TransformSet(name=f"{full.name}-sub{k}", specs=specs)
