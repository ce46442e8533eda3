from .network import ModelConfig, ModelOutputs, EquiInvNet, init_model, count_parameters
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint, read_header

__all__ = [
    'ModelConfig',
    'ModelOutputs',
    'EquiInvNet',
    'init_model',
    'count_parameters',
    'Checkpoint',
    'save_checkpoint',
    'load_checkpoint',
    'read_header'
]
