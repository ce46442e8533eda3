import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import torch
from unit_tests.oracles import oracle_finite_diff


def test_finite_diff_on_quadratic():
    """Central differences are exact for a quadratic up to rounding"""
    x = torch.tensor([0.5, -1.25, 2.0], dtype=torch.float64)
    a = np.array([3.0, 0.5, -2.0])
    b = np.array([1.0, -4.0, 0.25])

    def loss_fn():
        values = x.numpy()
        return float(np.sum(a * values ** 2 + b * values))

    grad, = oracle_finite_diff(loss_fn, [x], h=1e-5)
    assert np.allclose(grad, 2 * a * np.array([0.5, -1.25, 2.0]) + b, atol=1e-6)
    assert x.tolist() == [0.5, -1.25, 2.0]


def test_finite_diff_on_zero_function():
    """A constant loss has a zero gradient everywhere"""
    weights = torch.ones(2, 3, dtype=torch.float64)
    grad, = oracle_finite_diff(lambda: 0.0, [weights])
    assert grad.shape == (2, 3)
    assert np.all(grad == 0.0)


def test_finite_diff_selected_entries():
    """Selected flat indices come back in the requested order"""
    x = torch.tensor([[1.0, 2.0], [3.0, 4.0]], dtype=torch.float64)
    grad, = oracle_finite_diff(lambda: float((x ** 3).sum()), [x], h=1e-4, entries=[[3, 0]])
    assert np.allclose(grad, [48.0, 3.0], atol=1e-6)
