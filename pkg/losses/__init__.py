from .objectives import (
    LossConfig,
    LossBreakdown,
    ce_loss,
    equivariance_loss,
    contrast_score,
    invariance_loss,
    kd_divergence,
    distillation_loss,
    total_loss,
    objective_breakdown
)

__all__ = [
    'LossConfig',
    'LossBreakdown',
    'ce_loss',
    'equivariance_loss',
    'contrast_score',
    'invariance_loss',
    'kd_divergence',
    'distillation_loss',
    'total_loss',
    'objective_breakdown'
]
