"""Checkpoint container.

Layout: 8-byte magic, 4-byte little-endian header length, UTF-8 JSON
header, then float32 little-endian records back to back. The header holds
the format version, the model config, generation, epoch, the transform
specs and a record table of (name, shape, offset). Model tensors are named
``model.<state-dict key>``; trainer state uses the ``optim.`` and ``bank.``
prefixes.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import json
import logging
import os
import struct
import tempfile

import numpy as np
import torch

from constants import CHECKPOINT_FORMAT_VERSION, CHECKPOINT_MAGIC
from errors import CheckpointIOError, CheckpointShapeError, CheckpointVersionError
from .network import EquiInvNet, ModelConfig, init_model

logger = logging.getLogger(__name__)

_HEADER_LEN = struct.Struct('<I')
MODEL_PREFIX = 'model.'


@dataclass
class Checkpoint:
    model: EquiInvNet
    generation: int
    epoch: int
    tensors: Dict[str, torch.Tensor] = field(default_factory=dict)  # non-model records
    transforms: List[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def config(self) -> ModelConfig:
        return self.model.config


def save_checkpoint(model: EquiInvNet, path: str, generation: int = 0, epoch: int = 0,
                    tensors: Optional[Dict[str, torch.Tensor]] = None,
                    transforms: Optional[List[str]] = None, metadata: Optional[dict] = None) -> str:
    """
    Write a checkpoint atomically (temporary file, then rename).

    Args:
        model: model whose parameters and buffers are stored
        path: destination file
        generation: distillation stage of the model
        epoch: number of completed epochs
        tensors: extra named tensors (optimizer, memory bank)
        transforms: transform specs as comma-separated lines
        metadata: JSON-serializable extras

    Returns:
        The path written
    """
    records = {MODEL_PREFIX + k: v for k, v in model.state_dict().items()}
    records.update(tensors or {})

    table, blobs, offset = [], [], 0
    for name, tensor in records.items():
        values = np.ascontiguousarray(tensor.detach().cpu().to(torch.float64).numpy(), dtype='<f4')
        table.append({'name': name, 'shape': list(values.shape), 'offset': offset})
        blobs.append(values.tobytes())
        offset += values.nbytes

    header = json.dumps({
        'format_version': CHECKPOINT_FORMAT_VERSION,
        'config': model.config.to_dict(),
        'generation': generation,
        'epoch': epoch,
        'transforms': list(transforms or []),
        'metadata': metadata or {},
        'records': table,
    }).encode('utf-8')

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    try:
        fd, tmp_path = tempfile.mkstemp(dir=directory, suffix='.tmp')
        with os.fdopen(fd, 'wb') as handle:
            handle.write(CHECKPOINT_MAGIC)
            handle.write(_HEADER_LEN.pack(len(header)))
            handle.write(header)
            for blob in blobs:
                handle.write(blob)
        os.replace(tmp_path, path)
    except OSError as e:
        raise CheckpointIOError(f"Could not write checkpoint {path}: {e}") from e
    logger.info("Saved checkpoint %s (generation %d, epoch %d)", path, generation, epoch)
    return path


def _read_header(raw: bytes, path: str) -> Tuple[dict, int]:
    prefix = len(CHECKPOINT_MAGIC) + _HEADER_LEN.size
    if len(raw) < prefix or raw[:len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise CheckpointIOError(f"{path} is not a checkpoint or is truncated")
    (header_len,) = _HEADER_LEN.unpack_from(raw, len(CHECKPOINT_MAGIC))
    if len(raw) < prefix + header_len:
        raise CheckpointIOError(f"Checkpoint header of {path} is truncated")
    try:
        header = json.loads(raw[prefix:prefix + header_len].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointIOError(f"Checkpoint header of {path} is corrupt: {e}") from e
    return header, prefix + header_len


def read_header(path: str) -> dict:
    """Header of a checkpoint without building the model"""
    try:
        with open(path, 'rb') as handle:
            raw = handle.read()
    except OSError as e:
        raise CheckpointIOError(f"Could not read checkpoint {path}: {e}") from e
    return _read_header(raw, path)[0]


def load_checkpoint(path: str, config: Optional[ModelConfig] = None) -> Checkpoint:
    """
    Load a checkpoint.

    Args:
        path: checkpoint file
        config: model config to load into; defaults to the stored snapshot

    Raises:
        CheckpointIOError: unreadable, corrupt or truncated file
        CheckpointVersionError: unsupported format version
        CheckpointShapeError: stored tensors do not fit the model config
    """
    try:
        with open(path, 'rb') as handle:
            raw = handle.read()
    except OSError as e:
        raise CheckpointIOError(f"Could not read checkpoint {path}: {e}") from e

    header, data_start = _read_header(raw, path)
    version = header.get('format_version')
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointVersionError(
            f"Checkpoint format version {version} is not supported (expected {CHECKPOINT_FORMAT_VERSION})"
        )

    expected = data_start + 4 * sum(int(np.prod(r['shape'], dtype=np.int64)) for r in header['records'])
    if len(raw) != expected:
        raise CheckpointIOError(f"Checkpoint {path} has {len(raw)} bytes, expected {expected}")

    tensors = {}
    for record in header['records']:
        count = int(np.prod(record['shape'], dtype=np.int64))
        values = np.frombuffer(raw, dtype='<f4', count=count, offset=data_start + record['offset'])
        tensors[record['name']] = torch.from_numpy(values.reshape(record['shape']).copy())

    model_config = config or ModelConfig.from_dict(header['config'])
    model = init_model(model_config)
    state = model.state_dict()
    for key, target in state.items():
        stored = tensors.pop(MODEL_PREFIX + key, None)
        if stored is None:
            raise CheckpointShapeError(f"Checkpoint is missing tensor '{key}'")
        if tuple(stored.shape) != tuple(target.shape):
            raise CheckpointShapeError(
                f"Tensor '{key}' has shape {tuple(stored.shape)} in the checkpoint, model expects {tuple(target.shape)}"
            )
        state[key] = stored.to(target.dtype)
    leftover = [name for name in tensors if name.startswith(MODEL_PREFIX)]
    if leftover:
        raise CheckpointShapeError(f"Checkpoint has tensors the model does not: {', '.join(leftover)}")
    model.load_state_dict(state)

    logger.info("Loaded checkpoint %s (generation %d, epoch %d)", path, header['generation'], header['epoch'])
    return Checkpoint(
        model=model,
        generation=header['generation'],
        epoch=header['epoch'],
        tensors=tensors,
        transforms=header.get('transforms', []),
        metadata=header.get('metadata', {}),
    )
