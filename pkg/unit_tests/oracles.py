"""Brute-force reference implementations for the test suite.

Nothing here imports the production packages. Everything runs in float64
(or Python floats), with explicit loops where the formula allows.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence
import math

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class OracleTolerance:
    ce: float = 1e-12             # float64 cross-entropy
    contrastive: float = 1e-10    # float64 invariance loss
    closed_form: float = 1e-9     # hand-derived constants
    gradient_rel: float = 1e-4    # analytic vs central differences
    warp: float = 1e-5            # float32 images against the float64 sampler
    unit_norm: float = 1e-6       # memory-bank slots


TOL = OracleTolerance()


def oracle_logsumexp(values: Sequence[float]) -> float:
    top = max(values)
    return top + math.log(sum(math.exp(v - top) for v in values))


def oracle_softmax_ce(logits, labels) -> float:
    """Mean over rows of logsumexp(row) - row[label]"""
    logits = np.asarray(logits, dtype=np.float64)
    total = 0.0
    for row, label in zip(logits, labels):
        values = [float(v) for v in row]
        total += oracle_logsumexp(values) - values[int(label)]
    return total / len(logits)


def oracle_contrastive(v_blocks, bank_refs, negatives, tau: float) -> float:
    """
    Invariance loss term by term.

    For every transform m and instance b the reference is the bank copy when
    m == 0 and the identity-block projection otherwise; the loss is
    -log(exp(r.v/tau) / (exp(r.v/tau) + sum_n exp(n.v/tau))) averaged over m and b.
    """
    v_blocks = np.asarray(v_blocks, dtype=np.float64)
    bank_refs = np.asarray(bank_refs, dtype=np.float64)
    negatives = np.asarray(negatives, dtype=np.float64)
    m_count, batch, _ = v_blocks.shape
    total = 0.0
    for m in range(m_count):
        for b in range(batch):
            view = v_blocks[m, b]
            reference = bank_refs[b] if m == 0 else v_blocks[0, b]
            positive = sum(float(x) * float(y) for x, y in zip(reference, view)) / tau
            scores = [positive] + [sum(float(x) * float(y) for x, y in zip(n, view)) / tau for n in negatives]
            total += oracle_logsumexp(scores) - positive
    return total / (m_count * batch)


def oracle_contrast_score(v_r, v_m, negatives, tau: float) -> float:
    positive = math.exp(float(np.dot(v_r, v_m)) / tau)
    return positive / (positive + sum(math.exp(float(np.dot(n, v_m)) / tau) for n in negatives))


def oracle_kl(p: Sequence[float], q: Sequence[float]) -> float:
    """KL(p || q) for discrete distributions"""
    return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def oracle_softmax(values: Sequence[float], temperature: float = 1.0) -> List[float]:
    scaled = [v / temperature for v in values]
    norm = oracle_logsumexp(scaled)
    return [math.exp(v - norm) for v in scaled]


def oracle_finite_diff(loss_fn: Callable[[], float], parameters, h: float = 1e-5,
                       entries: Optional[Sequence[Sequence[int]]] = None) -> List[np.ndarray]:
    """
    Central differences (f(x + h) - f(x - h)) / 2h. Parameters are float64
    tensors modified in place and restored.

    Args:
        entries: flat indices to differentiate for each parameter; all entries if None

    Returns:
        One array per parameter: full-shaped when entries is None, otherwise
        the requested entries in the given order
    """
    gradients = []
    for p, param in enumerate(parameters):
        data = param.data.view(-1)
        selected = range(data.numel()) if entries is None else entries[p]
        grad = np.zeros(len(selected))
        for j, i in enumerate(selected):
            original = float(data[i])
            data[i] = original + h
            upper = float(loss_fn())
            data[i] = original - h
            lower = float(loss_fn())
            data[i] = original
            grad[j] = (upper - lower) / (2 * h)
        gradients.append(grad.reshape(tuple(param.shape)) if entries is None else grad)
    return gradients


def oracle_forward_matrix(rotation: int, scale: float, aspect_ratio: float, shear_deg: float) -> np.ndarray:
    """Linear part in (x, y-down): rotation . scale . diag(sqrt a, 1/sqrt a) . shear"""
    theta = rotation * math.pi / 2
    c, s = math.cos(theta), math.sin(theta)
    root = math.sqrt(aspect_ratio)
    t = math.tan(math.radians(shear_deg))
    shear = [[1.0, t], [0.0, 1.0]]
    aspect = [[scale * root, 0.0], [0.0, scale / root]]
    rot = [[c, s], [-s, c]]

    def mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]

    return np.array(mul(rot, mul(aspect, shear)))


def oracle_source_coords(row: int, col: int, height: int, width: int, linear: np.ndarray,
                         translate_x: float = 0.0, translate_y: float = 0.0):
    """Input (row, col) that output pixel (row, col) samples from"""
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    x = col - cx - translate_x * width
    y = row - cy - translate_y * height
    det = linear[0, 0] * linear[1, 1] - linear[0, 1] * linear[1, 0]
    sx = (linear[1, 1] * x - linear[0, 1] * y) / det
    sy = (-linear[1, 0] * x + linear[0, 0] * y) / det
    return sy + cy, sx + cx


def oracle_bilinear(image: np.ndarray, row: float, col: float) -> np.ndarray:
    """Bilinear sample of an H x W x C image; zero outside [0, H-1] x [0, W-1]"""
    height, width = image.shape[:2]
    if row < 0 or col < 0 or row > height - 1 or col > width - 1:
        return np.zeros(image.shape[2])
    r0, c0 = min(int(math.floor(row)), height - 2), min(int(math.floor(col)), width - 2)
    fr, fc = row - r0, col - c0
    image = image.astype(np.float64)
    return ((1 - fr) * (1 - fc) * image[r0, c0] + (1 - fr) * fc * image[r0, c0 + 1]
            + fr * (1 - fc) * image[r0 + 1, c0] + fr * fc * image[r0 + 1, c0 + 1])


def oracle_sgd(params: np.ndarray, gradients: Sequence[np.ndarray], lr: float, momentum: float,
               weight_decay: float) -> np.ndarray:
    """buf <- momentum * buf + (g + wd * p) (buf = g + wd * p on the first step); p <- p - lr * buf"""
    params = np.array(params, dtype=np.float64)
    buffer = None
    for grad in gradients:
        g = np.asarray(grad, dtype=np.float64) + weight_decay * params
        buffer = g if buffer is None else momentum * buffer + g
        params = params - lr * buffer
    return params


def oracle_top_variance_share(data: np.ndarray, k: int = 2) -> np.ndarray:
    """Leading k covariance eigenvalues divided by the total variance"""
    data = np.asarray(data, dtype=np.float64)
    centered = data - data.mean(axis=0)
    covariance = centered.T @ centered / (len(data) - 1)
    eigenvalues = np.sort(np.linalg.eigvalsh(covariance))[::-1]
    return eigenvalues[:k] / eigenvalues.sum()


def oracle_ci95(values: Sequence[float]) -> float:
    n = len(values)
    mean = sum(values) / n
    variance = sum((v - mean) ** 2 for v in values) / (n - 1)
    return 1.96 * math.sqrt(variance) / math.sqrt(n)


def oracle_mean_logreg(embeddings, labels, c: float = 1.0):
    """
    Multinomial logistic regression on row-normalized embeddings minimizing
    mean NLL + ||W||^2 / (2c) with an unpenalized bias, solved by L-BFGS.

    Returns:
        (W, b) with W of shape classes x D
    """
    x = np.asarray(embeddings, dtype=np.float64)
    x = x / np.linalg.norm(x, axis=1, keepdims=True)
    labels = np.asarray(labels)
    classes = np.unique(labels)
    targets = (labels[:, None] == classes[None, :]).astype(np.float64)
    n, d = x.shape
    k = len(classes)

    def objective(theta):
        weights, bias = theta[:k * d].reshape(k, d), theta[k * d:]
        logits = x @ weights.T + bias
        top = logits.max(axis=1, keepdims=True)
        log_norm = top[:, 0] + np.log(np.exp(logits - top).sum(axis=1))
        loss = np.mean(log_norm - (logits * targets).sum(axis=1)) + (weights ** 2).sum() / (2 * c)
        residual = (np.exp(logits - log_norm[:, None]) - targets) / n
        grad = np.concatenate([(residual.T @ x + weights / c).ravel(), residual.sum(axis=0)])
        return loss, grad

    result = minimize(objective, np.zeros(k * d + k), jac=True, method='L-BFGS-B',
                      options={'gtol': 1e-12, 'ftol': 1e-15, 'maxiter': 10000})
    return result.x[:k * d].reshape(k, d), result.x[k * d:]
