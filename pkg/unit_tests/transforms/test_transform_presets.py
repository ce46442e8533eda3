import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import pytest
import numpy as np
from constants import TRANSFORM_PRESETS
from errors import ConfigError
from transforms import IDENTITY, TransformSet, TransformSpec, build_preset, sample_affine_subset

EXPECTED_SIZES = {'m3': 3, 'm4': 4, 'm8': 8, 'm12': 12, 'm16': 16, 'm20': 20, 'm24': 24, 'affine972': 972}


@pytest.mark.parametrize('name', TRANSFORM_PRESETS)
def test_preset_cardinality_and_identity(name):
    """Every preset has its advertised size, distinct members and the identity first"""
    transform_set = build_preset(name)

    assert len(transform_set) == EXPECTED_SIZES[name]
    assert len(set(transform_set.specs)) == len(transform_set)
    assert transform_set[0] == IDENTITY
    assert transform_set.has_identity


def test_affine972_covers_full_grid():
    """Every axis combination of the affine grid appears exactly once"""
    transform_set = build_preset('affine972')
    axes = {
        'rotation': {0, 1, 2, 3},
        'translate_x': {0.0, -0.2, 0.2},
        'translate_y': {0.0, -0.2, 0.2},
        'scale': {1.0, 0.67, 1.33},
        'aspect_ratio': {1.0, 0.67, 1.33},
        'shear': {0.0, -20.0, 20.0},
    }
    for field_name, values in axes.items():
        assert {getattr(spec, field_name) for spec in transform_set} == values


def test_m4_is_rotation_group():
    """m4 is the four quarter turns in order"""
    transform_set = build_preset('m4')
    assert [spec.rotation for spec in transform_set] == [0, 1, 2, 3]
    assert all(spec.is_quarter_turn for spec in transform_set)


def test_build_preset_case_insensitive():
    """Preset names are case insensitive"""
    assert build_preset('M16').specs == build_preset('m16').specs


def test_build_preset_unknown():
    """Error message names the supported presets"""
    with pytest.raises(ConfigError) as exc_info:
        build_preset('m7')

    error_msg = str(exc_info.value)
    assert 'Unknown transform preset: m7' in error_msg
    assert 'm16' in error_msg and 'affine972' in error_msg


def test_sample_affine_subset_properties():
    """Subset has k distinct members, identity first, all from the full set"""
    full = build_preset('affine972')
    subset = sample_affine_subset(full, 10, np.random.default_rng(3))

    assert len(subset) == 10
    assert subset[0] == IDENTITY
    assert set(subset.specs) <= set(full.specs)
    assert subset.name == 'affine972-sub10'


def test_sample_affine_subset_deterministic():
    """Same seed gives the same subset, different seeds differ"""
    full = build_preset('affine972')
    first = sample_affine_subset(full, 10, np.random.default_rng(1))
    again = sample_affine_subset(full, 10, np.random.default_rng(1))
    other = sample_affine_subset(full, 10, np.random.default_rng(2))

    assert first.specs == again.specs
    assert first.specs != other.specs


def test_sample_affine_subset_full_size_is_identity_permutation():
    """Drawing every transform returns the set in its original order"""
    full = build_preset('m24')
    subset = sample_affine_subset(full, len(full), np.random.default_rng(0))
    assert subset.specs == full.specs


@pytest.mark.parametrize('k', [0, 1, 973])
def test_sample_affine_subset_bounds(k):
    """k below 2 or above the set size is an argument error"""
    with pytest.raises(ValueError):
        sample_affine_subset(build_preset('affine972'), k, np.random.default_rng(0))


def test_transform_set_validation():
    """Sets need two distinct transforms with the identity at index 0"""
    rot = TransformSpec(rotation=1)
    with pytest.raises(ValueError):
        TransformSet('one', (IDENTITY,))
    with pytest.raises(ValueError):
        TransformSet('dup', (IDENTITY, rot, rot))
    with pytest.raises(ValueError):
        TransformSet('late', (rot, IDENTITY))


def test_transform_spec_validation():
    """Out-of-range parameters are rejected"""
    with pytest.raises(ValueError):
        TransformSpec(rotation=4)
    with pytest.raises(ValueError):
        TransformSpec(scale=0.0)


def test_transform_lines_rebuild_set():
    """Serialized lines rebuild the same set"""
    transform_set = build_preset('m16')
    rebuilt = TransformSet.from_lines('m16', transform_set.to_lines())
    assert rebuilt.specs == transform_set.specs
