import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

import math
import pytest
import numpy as np
import torch
import torch.nn.functional as F
from errors import ConfigError
from losses import (
    LossConfig, ce_loss, contrast_score, distillation_loss, equivariance_loss, invariance_loss,
    kd_divergence, objective_breakdown, total_loss
)
from model import ModelConfig, ModelOutputs, init_model
from transforms import TransformSet, build_preset, expand_batch
from unit_tests.oracles import (
    TOL, oracle_contrast_score, oracle_contrastive, oracle_finite_diff, oracle_kl, oracle_softmax,
    oracle_softmax_ce
)


def _unit(generator, *shape):
    return F.normalize(torch.randn(*shape, generator=generator, dtype=torch.float64), dim=-1)


def test_ce_uniform_logits():
    """Uniform logits over 10 classes give ln 10"""
    loss = ce_loss(torch.zeros(4, 10, dtype=torch.float64), torch.tensor([0, 3, 9, 5]))
    assert abs(loss.item() - math.log(10)) < TOL.ce


def test_ce_matches_oracle():
    """Cross-entropy agrees with the explicit log-sum-exp on random instances"""
    generator = torch.Generator().manual_seed(0)
    for _ in range(1000):
        n, c = int(torch.randint(1, 6, (1,), generator=generator)), int(torch.randint(2, 8, (1,), generator=generator))
        logits = torch.randn(n, c, generator=generator, dtype=torch.float64) * 3
        labels = torch.randint(0, c, (n,), generator=generator)
        assert abs(ce_loss(logits, labels).item() - oracle_softmax_ce(logits.numpy(), labels.numpy())) < TOL.ce


def test_ce_saturated_single_class():
    """A saturated correct logit drives the loss to zero"""
    logits = torch.tensor([[50.0, -50.0]], dtype=torch.float64)
    assert ce_loss(logits, torch.tensor([0])).item() < 1e-12


def test_ce_label_out_of_range():
    """Labels must index a logit column"""
    with pytest.raises(ValueError):
        ce_loss(torch.zeros(2, 3), torch.tensor([0, 3]))


def test_equivariance_is_ce_on_proxy_labels():
    """The equivariance loss is cross-entropy against the transform index"""
    logits = torch.randn(6, 4, dtype=torch.float64)
    proxy = torch.tensor([0, 0, 1, 1, 2, 3])
    assert equivariance_loss(logits, proxy).item() == pytest.approx(oracle_softmax_ce(logits.numpy(), proxy.numpy()))


def test_contrast_score_closed_form():
    """Identical positive, one orthogonal negative: e / (e + 1); swapped: 1 / (1 + e)"""
    e1 = torch.tensor([1.0, 0.0], dtype=torch.float64)
    e2 = torch.tensor([0.0, 1.0], dtype=torch.float64)

    same = contrast_score(e1, e1, e2.unsqueeze(0), tau=1.0)
    swapped = contrast_score(e2, e1, e1.unsqueeze(0), tau=1.0)

    assert abs(same.item() - math.e / (math.e + 1)) < TOL.closed_form
    assert abs(same.item() - 0.731059) < 1e-6
    assert abs(swapped.item() - 1 / (1 + math.e)) < TOL.closed_form
    assert abs(swapped.item() - 0.268941) < 1e-6


def test_contrast_score_matches_oracle():
    """Score agrees with the direct formula"""
    generator = torch.Generator().manual_seed(1)
    v_r, v_m, negatives = _unit(generator, 5), _unit(generator, 5), _unit(generator, 7, 5)
    expected = oracle_contrast_score(v_r.numpy(), v_m.numpy(), negatives.numpy(), 0.5)
    assert abs(contrast_score(v_r, v_m, negatives, 0.5).item() - expected) < TOL.closed_form


def test_contrast_score_rejects_non_finite():
    """NaN inputs are argument errors"""
    v = torch.tensor([float('nan'), 0.0])
    with pytest.raises(ValueError):
        contrast_score(v, v, torch.zeros(1, 2), 1.0)


def test_invariance_loss_matches_oracle():
    """The vectorized loss agrees with the term-by-term transcription"""
    generator = torch.Generator().manual_seed(2)
    for _ in range(1000):
        m = int(torch.randint(1, 4, (1,), generator=generator))
        b = int(torch.randint(1, 4, (1,), generator=generator))
        k = int(torch.randint(1, 5, (1,), generator=generator))
        d = int(torch.randint(2, 5, (1,), generator=generator))
        tau = float(torch.rand(1, generator=generator)) + 0.1
        v_blocks, bank_refs, negatives = _unit(generator, m, b, d), _unit(generator, b, d), _unit(generator, k, d)

        loss = invariance_loss(v_blocks, bank_refs, negatives, tau).item()
        expected = oracle_contrastive(v_blocks.numpy(), bank_refs.numpy(), negatives.numpy(), tau)
        assert abs(loss - expected) < TOL.contrastive


def test_invariance_loss_single_transform_perfect_reference():
    """With M = 1, an identical reference and a far negative, the loss goes to zero"""
    v = torch.tensor([[[1.0, 0.0]]], dtype=torch.float64)
    loss = invariance_loss(v, v[0], torch.tensor([[-1.0, 0.0]], dtype=torch.float64), tau=0.01)
    assert loss.item() < 1e-12


def test_invariance_loss_decreases_with_positive_similarity():
    """Rotating a transformed view toward v0 strictly lowers the loss"""
    v0 = torch.tensor([1.0, 0.0, 0.0], dtype=torch.float64)
    negatives = torch.tensor([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]], dtype=torch.float64)
    losses = []
    for angle in np.linspace(math.pi, 0.0, 13):
        view = torch.tensor([math.cos(angle), math.sin(angle), 0.0], dtype=torch.float64)
        v_blocks = torch.stack([v0, view]).unsqueeze(1)
        losses.append(invariance_loss(v_blocks, v0.unsqueeze(0), negatives, tau=0.5).item())
    assert all(later < earlier for earlier, later in zip(losses, losses[1:]))


def test_invariance_loss_negative_order_irrelevant():
    """Permuting the negatives does not change the loss"""
    generator = torch.Generator().manual_seed(3)
    v_blocks, bank_refs, negatives = _unit(generator, 3, 2, 4), _unit(generator, 2, 4), _unit(generator, 6, 4)
    permuted = negatives[torch.randperm(6, generator=generator)]
    assert torch.allclose(invariance_loss(v_blocks, bank_refs, negatives, 1.0),
                          invariance_loss(v_blocks, bank_refs, permuted, 1.0), atol=1e-14)


def test_kd_divergence_binary_example():
    """Two-class KL with T = 1 matches the Bernoulli formula"""
    teacher = torch.tensor([[math.log(0.8), math.log(0.2)]], dtype=torch.float64)
    student = torch.tensor([[math.log(0.5), math.log(0.5)]], dtype=torch.float64)
    expected = 0.8 * math.log(0.8 / 0.5) + 0.2 * math.log(0.2 / 0.5)
    assert abs(kd_divergence(teacher, student, 1.0).item() - expected) < TOL.closed_form


def test_kd_divergence_temperature_scaling():
    """The softened KL is multiplied by T squared"""
    teacher = torch.tensor([[2.0, -1.0, 0.5]], dtype=torch.float64)
    student = torch.tensor([[0.0, 1.0, -0.5]], dtype=torch.float64)
    p = oracle_softmax(teacher[0].tolist(), 4.0)
    q = oracle_softmax(student[0].tolist(), 4.0)
    assert abs(kd_divergence(teacher, student, 4.0).item() - 16.0 * oracle_kl(p, q)) < TOL.closed_form


def test_distillation_zero_for_identical_outputs():
    """A student equal to its teacher has zero distillation loss"""
    generator = torch.Generator().manual_seed(4)
    outputs = ModelOutputs(torch.randn(3, 4, generator=generator), torch.randn(3, 5, generator=generator),
                           torch.randn(3, 2, generator=generator), _unit(generator, 3, 6).float())
    assert distillation_loss(outputs, outputs, 4.0).item() == pytest.approx(0.0, abs=1e-6)


def test_distillation_l2_term():
    """With matching logits only the mean squared error of v remains"""
    v_teacher = torch.tensor([[1.0, 0.0], [0.0, 1.0]], dtype=torch.float64)
    v_student = torch.tensor([[0.0, 1.0], [0.0, 1.0]], dtype=torch.float64)
    logits = torch.zeros(2, 3, dtype=torch.float64)
    teacher = ModelOutputs(None, logits, logits, v_teacher)
    student = ModelOutputs(None, logits, logits, v_student)
    assert distillation_loss(teacher, student, 4.0).item() == pytest.approx(0.5)


def test_distillation_shape_mismatch():
    """Teacher and student heads must have the same shapes"""
    teacher = ModelOutputs(None, torch.zeros(2, 3), torch.zeros(2, 4), torch.zeros(2, 5))
    student = ModelOutputs(None, torch.zeros(2, 3), torch.zeros(2, 5), torch.zeros(2, 5))
    with pytest.raises(ValueError):
        distillation_loss(teacher, student, 4.0)


def test_total_loss_weights():
    """total = ce + w_eq * eq + w_in * inv + w_kd * kd"""
    config = LossConfig(w_eq=0.5, w_in=2.0, w_kd=3.0)
    terms = [torch.tensor(v, dtype=torch.float64) for v in (1.0, 2.0, 3.0, 4.0)]
    assert total_loss(*terms, config).total.item() == pytest.approx(1.0 + 1.0 + 6.0 + 12.0)
    without_teacher = total_loss(*terms[:3], None, config)
    assert without_teacher.total.item() == pytest.approx(8.0)
    assert without_teacher.kd.item() == 0.0


def test_baseline_weights_reduce_to_ce():
    """Zero inductive weights leave only the classification term"""
    config = LossConfig(w_eq=0.0, w_in=0.0)
    terms = [torch.tensor(v, dtype=torch.float64) for v in (1.5, 9.0, 9.0)]
    assert total_loss(*terms, None, config).total.item() == pytest.approx(1.5)


def test_loss_config_validation():
    """Temperatures must be positive and weights non-negative"""
    with pytest.raises(ConfigError):
        LossConfig(tau=0.0).validate()
    with pytest.raises(ConfigError):
        LossConfig(w_eq=-1.0).validate()
    with pytest.raises(ConfigError):
        LossConfig(w_in=float('nan')).validate()


def test_loss_at_initialization():
    """An untrained model sits near ln 10 for classes and ln 16 for transforms"""
    model = init_model(ModelConfig(num_classes=10, num_transforms=16, seed=0))
    transform_set = build_preset('m16')
    rng = np.random.default_rng(0)
    ce_values, eq_values = [], []
    for _ in range(100):
        images = rng.random((2, 8, 8, 3)).astype(np.float32)
        labels = rng.integers(0, 10, size=2)
        expanded = expand_batch(images, labels, np.arange(2), transform_set)
        batch, class_labels, proxy_labels, _ = expanded.as_tensors()
        outputs = model.predict(batch)
        ce_values.append(ce_loss(outputs.class_logits, class_labels).item())
        eq_values.append(equivariance_loss(outputs.transform_logits, proxy_labels).item())

    assert abs(np.mean(ce_values) - math.log(10)) < 0.1 * math.log(10)
    assert abs(np.mean(eq_values) - math.log(16)) < 0.1 * math.log(16)


def _gradient_problem(seed):
    config = ModelConfig(backbone='conv4-tiny', embed_dim=8, num_classes=2, num_transforms=2,
                         invariant_dim=4, head_hidden=8, seed=seed)
    student = init_model(config).double()
    teacher = init_model(ModelConfig(**{**config.to_dict(), 'seed': seed + 100})).double()
    teacher.eval()
    teacher.requires_grad_(False)

    rng = np.random.default_rng(seed)
    images = rng.random((2, 4, 4, 3))
    pair = TransformSet('pair', build_preset('m4').specs[:2])
    expanded = expand_batch(images, np.array([0, 1]), np.array([0, 1]), pair)
    batch, class_labels, proxy_labels, _ = expanded.as_tensors(dtype=torch.float64)
    generator = torch.Generator().manual_seed(seed)
    bank_refs, negatives = _unit(generator, 2, 4), _unit(generator, 5, 4)
    with torch.no_grad():
        teacher_outputs = teacher(batch)
    loss_config = LossConfig(tau=1.0, kd_temperature=4.0)

    def loss_fn():
        outputs = student(batch)
        return objective_breakdown(outputs, class_labels, proxy_labels, bank_refs, negatives,
                                   loss_config, teacher_outputs).total

    return student, loss_fn


@pytest.mark.parametrize('seed', range(5))
def test_total_loss_gradient_matches_finite_differences(seed):
    """Analytic gradients of the full objective agree with central differences"""
    student, loss_fn = _gradient_problem(seed)
    student.train()
    parameters = [p for p in student.parameters()]

    student.zero_grad()
    loss_fn().backward()
    rng = np.random.default_rng(seed)
    entries = [rng.choice(p.numel(), size=min(6, p.numel()), replace=False) for p in parameters]
    analytic = np.concatenate([p.grad.view(-1).numpy()[idx] for p, idx in zip(parameters, entries)])

    with torch.no_grad():
        numeric = np.concatenate(oracle_finite_diff(lambda: loss_fn().item(), parameters, h=1e-5, entries=entries))

    error = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    assert error < TOL.gradient_rel
