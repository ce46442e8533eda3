from typing import Dict, Iterable
import logging

import torch
import torch.nn.functional as F

from constants import BANK_MOMENTUM

logger = logging.getLogger(__name__)


class MemoryBank:
    """
    Per-instance unit vectors supplying negatives and past references.

    Args:
        n_instances: number of slots, one per base-training image
        dim: slot width D
        seed: seeds both the initial slots and negative sampling
        momentum: weight of the old slot in an update, in [0, 1)
        dtype: slot precision
    """

    def __init__(self, n_instances: int, dim: int, seed: int = 0, momentum: float = BANK_MOMENTUM,
                 dtype: torch.dtype = torch.float64):
        if n_instances < 1 or dim < 1:
            raise ValueError(f"Memory bank needs n_instances >= 1 and dim >= 1, got {n_instances}, {dim}")
        if not 0.0 <= momentum < 1.0:
            raise ValueError(f"Memory bank momentum must lie in [0, 1), got {momentum}")
        self.momentum = momentum
        self.generator = torch.Generator().manual_seed(seed)
        slots = torch.randn(n_instances, dim, generator=self.generator, dtype=dtype)
        self.slots = F.normalize(slots, dim=1)

    @property
    def n_instances(self) -> int:
        return self.slots.shape[0]

    @property
    def dim(self) -> int:
        return self.slots.shape[1]

    def _check_ids(self, ids: torch.Tensor):
        if ids.numel() and (ids.min() < 0 or ids.max() >= self.n_instances):
            raise ValueError(f"Instance ids must lie in [0, {self.n_instances}), got {ids.tolist()}")

    def get_past_reference(self, instance_id: int) -> torch.Tensor:
        """Current slot of one instance; the bank is not modified"""
        if not 0 <= int(instance_id) < self.n_instances:
            raise ValueError(f"Instance id {instance_id} out of range [0, {self.n_instances})")
        return self.slots[int(instance_id)].clone()

    def past_references(self, instance_ids) -> torch.Tensor:
        ids = torch.as_tensor(instance_ids, dtype=torch.long)
        self._check_ids(ids)
        return self.slots[ids].clone()

    def sample_negatives(self, exclude_ids: Iterable[int], count: int) -> torch.Tensor:
        """Draw count slots uniformly without replacement, skipping excluded ids"""
        ids = self.sample_negative_ids(exclude_ids, count)
        return self.slots[ids].clone()

    def sample_negative_ids(self, exclude_ids: Iterable[int], count: int) -> torch.Tensor:
        excluded = torch.as_tensor(list(exclude_ids), dtype=torch.long)
        self._check_ids(excluded)
        allowed = torch.ones(self.n_instances, dtype=torch.bool)
        allowed[excluded] = False
        candidates = allowed.nonzero(as_tuple=True)[0]
        if count < 0 or count > len(candidates):
            raise ValueError(
                f"Cannot sample {count} negatives: only {len(candidates)} slots remain after exclusions"
            )
        order = torch.randperm(len(candidates), generator=self.generator)[:count]
        return candidates[order]

    def update(self, instance_ids, references: torch.Tensor):
        """
        slot <- normalize(momentum * slot + (1 - momentum) * reference)

        Args:
            instance_ids: ids of the current minibatch, no duplicates
            references: unit-norm v0 rows, one per id
        """
        ids = torch.as_tensor(instance_ids, dtype=torch.long)
        self._check_ids(ids)
        references = references.detach().to(self.slots.dtype)
        if references.shape != (len(ids), self.dim):
            raise ValueError(f"Expected references of shape ({len(ids)}, {self.dim}), got {tuple(references.shape)}")
        if len(torch.unique(ids)) != len(ids):
            raise ValueError("Duplicate instance ids in one memory bank update")

        mixed = self.momentum * self.slots[ids] + (1.0 - self.momentum) * references
        norms = mixed.norm(dim=1, keepdim=True)
        # antipodal slot and reference cancel out; keep the reference
        degenerate = norms.squeeze(1) < 1e-12
        mixed[degenerate] = references[degenerate]
        self.slots[ids] = F.normalize(mixed, dim=1)

    def state_tensors(self, prefix: str = 'bank.') -> Dict[str, torch.Tensor]:
        return {
            prefix + 'slots': self.slots.clone(),
            prefix + 'rng_state': self.generator.get_state().to(torch.float32),
        }

    def load_state_tensors(self, tensors: Dict[str, torch.Tensor], prefix: str = 'bank.'):
        slots = tensors[prefix + 'slots'].to(self.slots.dtype)
        if slots.shape != self.slots.shape:
            raise ValueError(f"Stored bank has shape {tuple(slots.shape)}, expected {tuple(self.slots.shape)}")
        self.slots = F.normalize(slots, dim=1)
        self.generator.set_state(tensors[prefix + 'rng_state'].to(torch.uint8))


def init_bank(n_instances: int, dim: int, seed: int = 0, momentum: float = BANK_MOMENTUM) -> MemoryBank:
    return MemoryBank(n_instances, dim, seed=seed, momentum=momentum)
