"""Training objectives: classification, equivariance, invariance, distillation."""
from dataclasses import dataclass, asdict
from typing import Dict, Optional
import math

import torch
import torch.nn.functional as F

from constants import CONTRAST_TEMPERATURE, KD_TEMPERATURE, LOSS_COEFFICIENT, NEGATIVES_PER_BATCH
from errors import ConfigError


@dataclass
class LossConfig:
    tau: float = CONTRAST_TEMPERATURE
    kd_temperature: float = KD_TEMPERATURE
    w_eq: float = LOSS_COEFFICIENT
    w_in: float = LOSS_COEFFICIENT
    w_kd: float = LOSS_COEFFICIENT
    negatives_per_batch: int = NEGATIVES_PER_BATCH

    def validate(self) -> 'LossConfig':
        if not (self.tau > 0 and self.kd_temperature > 0):
            raise ConfigError(f"Temperatures must be positive, got tau={self.tau}, T={self.kd_temperature}")
        for key in ('w_eq', 'w_in', 'w_kd'):
            value = getattr(self, key)
            if not math.isfinite(value) or value < 0:
                raise ConfigError(f"loss.{key} must be a finite non-negative number, got {value}")
        if self.negatives_per_batch < 0:
            raise ConfigError(f"loss.negatives_per_batch must be >= 0, got {self.negatives_per_batch}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LossBreakdown:
    """total = ce + w_eq * eq + w_in * inv + w_kd * kd"""
    ce: torch.Tensor
    eq: torch.Tensor
    inv: torch.Tensor
    kd: torch.Tensor
    total: torch.Tensor

    def to_record(self) -> Dict[str, float]:
        return {
            'ce': float(self.ce),
            'eq': float(self.eq),
            'in': float(self.inv),
            'kd': float(self.kd),
            'total': float(self.total),
        }

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.to_record().values())


def ce_loss(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy over rows"""
    labels = torch.as_tensor(labels, dtype=torch.long, device=logits.device)
    if logits.dim() != 2 or labels.shape != logits.shape[:1]:
        raise ValueError(f"Expected n x C logits and n labels, got {tuple(logits.shape)} and {tuple(labels.shape)}")
    if labels.numel() and (labels.min() < 0 or labels.max() >= logits.shape[1]):
        raise ValueError(f"Labels must lie in [0, {logits.shape[1]}), got {labels.tolist()}")
    return F.cross_entropy(logits, labels)


def equivariance_loss(transform_logits: torch.Tensor, proxy_labels: torch.Tensor) -> torch.Tensor:
    """Cross-entropy of the transform head against the applied transform index"""
    return ce_loss(transform_logits, proxy_labels)


def _log_scores(references: torch.Tensor, views: torch.Tensor, negatives: torch.Tensor,
                tau: float) -> torch.Tensor:
    """log h for paired rows of references and views (last dimension is D)"""
    positive = (references * views).sum(dim=-1, keepdim=True) / tau
    negative = views @ negatives.to(views.dtype).transpose(0, 1) / tau
    return positive.squeeze(-1) - torch.logsumexp(torch.cat([positive, negative], dim=-1), dim=-1)


def contrast_score(v_r: torch.Tensor, v_m: torch.Tensor, negatives: torch.Tensor, tau: float) -> torch.Tensor:
    """
    Score h of a positive pair against a set of negatives.

    h = exp(s(v_r, v_m)/tau) / (exp(s(v_r, v_m)/tau) + sum_neg exp(s(v', v_m)/tau)),
    with s the dot product of unit vectors.
    """
    negatives = negatives.reshape(-1, v_m.shape[-1])
    for name, tensor in (('v_r', v_r), ('v_m', v_m), ('negatives', negatives)):
        if not torch.isfinite(tensor).all():
            raise ValueError(f"{name} contains non-finite values")
    return torch.exp(_log_scores(v_r, v_m, negatives, tau))


def invariance_loss(v_blocks: torch.Tensor, bank_refs: torch.Tensor, negatives: torch.Tensor,
                    tau: float) -> torch.Tensor:
    """
    Contrastive invariance loss over M transform blocks.

    Args:
        v_blocks: M x B x D projections; block 0 is the identity transform (v0)
        bank_refs: B x D past references of the same instances from the memory bank
        negatives: K x D memory-bank negatives shared by every term
        tau: temperature

    Returns:
        -(1/M) sum_m log h(v_r, v_m), averaged over the batch. The reference
        v_r is the bank copy for m = 0 and v0 otherwise.
    """
    if v_blocks.dim() != 3 or v_blocks.shape[0] < 1:
        raise ValueError(f"Expected M x B x D blocks with M >= 1, got {tuple(v_blocks.shape)}")
    m_count = v_blocks.shape[0]
    reference = v_blocks[0:1].expand(m_count - 1, -1, -1)
    references = torch.cat([bank_refs.to(v_blocks.dtype).unsqueeze(0), reference], dim=0)
    return -_log_scores(references, v_blocks, negatives.reshape(-1, v_blocks.shape[-1]), tau).mean()


def kd_divergence(teacher_logits: torch.Tensor, student_logits: torch.Tensor, temperature: float) -> torch.Tensor:
    """T^2 * KL(softmax(teacher/T) || softmax(student/T)), averaged over rows"""
    log_p = F.log_softmax(student_logits / temperature, dim=1)
    log_q = F.log_softmax(teacher_logits.detach() / temperature, dim=1)
    return F.kl_div(log_p, log_q, reduction='batchmean', log_target=True) * temperature ** 2


def distillation_loss(teacher_outputs, student_outputs, temperature: float) -> torch.Tensor:
    """
    Multi-head distillation: KL on the class and transform heads, mean
    squared error on the invariant projection. The teacher is a constant.
    """
    for name in ('class_logits', 'transform_logits', 'v'):
        t_shape = tuple(getattr(teacher_outputs, name).shape)
        s_shape = tuple(getattr(student_outputs, name).shape)
        if t_shape != s_shape:
            raise ValueError(f"Teacher and student {name} shapes differ: {t_shape} vs {s_shape}")
    l2 = F.mse_loss(student_outputs.v, teacher_outputs.v.detach())
    return (kd_divergence(teacher_outputs.class_logits, student_outputs.class_logits, temperature)
            + kd_divergence(teacher_outputs.transform_logits, student_outputs.transform_logits, temperature)
            + l2)


def total_loss(ce: torch.Tensor, eq: torch.Tensor, inv: torch.Tensor, kd: Optional[torch.Tensor],
               config: LossConfig) -> LossBreakdown:
    """Weighted sum of the terms; kd is None when there is no teacher"""
    if kd is None:
        kd = torch.zeros((), dtype=ce.dtype, device=ce.device)
        total = ce + config.w_eq * eq + config.w_in * inv
    else:
        total = ce + config.w_eq * eq + config.w_in * inv + config.w_kd * kd
    return LossBreakdown(ce=ce, eq=eq, inv=inv, kd=kd, total=total)


def objective_breakdown(outputs, class_labels: torch.Tensor, proxy_labels: torch.Tensor,
                        bank_refs: torch.Tensor, negatives: torch.Tensor, config: LossConfig,
                        teacher_outputs=None) -> LossBreakdown:
    """
    Every loss term for one transform-major expanded batch.

    Args:
        outputs: ModelOutputs of the student on B*M images
        class_labels, proxy_labels: B*M labels
        bank_refs: B x D memory-bank references of the source images
        negatives: K x D memory-bank negatives
        config: loss weights and temperatures
        teacher_outputs: frozen teacher ModelOutputs, or None in generation 0
    """
    batch = bank_refs.shape[0]
    v_blocks = outputs.v.reshape(-1, batch, outputs.v.shape[1])
    kd = None
    if teacher_outputs is not None:
        kd = distillation_loss(teacher_outputs, outputs, config.kd_temperature)
    return total_loss(
        ce=ce_loss(outputs.class_logits, class_labels),
        eq=equivariance_loss(outputs.transform_logits, proxy_labels),
        inv=invariance_loss(v_blocks, bank_refs, negatives, config.tau),
        kd=kd,
        config=config,
    )
