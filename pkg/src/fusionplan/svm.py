"""Binary kernel max-margin classifiers with a small SMO-style trainer.

The solver is the simplified sequential minimal optimization scheme: sweep
the training set, pick a random partner for every KKT-violating example,
solve the two-variable subproblem analytically and clip to the box
[0, C].  Good enough for the desk-scale datasets this package works with,
and fully deterministic for a fixed seed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

LINEAR = "linear"
RBF = "rbf"


def kernel_matrix(kind: str, gamma: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Gram matrix k(a_i, b_j) for the linear or radial-basis kernel."""
    if kind == LINEAR:
        return A @ B.T
    if kind == RBF:
        sq = (
            np.sum(A**2, axis=1)[:, None]
            + np.sum(B**2, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"unknown kernel {kind!r}")


@dataclass(frozen=True)
class KernelClassifier:
    """Support vectors with dual weights and a bias.

    decision(x) = sum_i alpha_i * label_i * k(sv_i, x) + bias, and the
    predicted label is the sign of the decision value.
    """

    support_vectors: np.ndarray   # (n_sv, 2)
    alphas: np.ndarray            # (n_sv,), all > 0
    labels: np.ndarray            # (n_sv,), each +1 or -1
    bias: float
    kernel: str = RBF
    gamma: float = 2.0
    c_param: float = 10.0
    converged: bool = True
    train_accuracy: float = float("nan")

    def __post_init__(self):
        if np.any(self.alphas < 0):
            raise ValueError("dual weights must be non-negative")

    def decision(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        K = kernel_matrix(self.kernel, self.gamma, X, self.support_vectors)
        return K @ (self.alphas * self.labels) + self.bias

    def predict(self, X: np.ndarray) -> np.ndarray:
        values = self.decision(X)
        return np.where(values > 0, 1, -1)

    def decision_gradient(self, X: np.ndarray) -> np.ndarray:
        """Analytic gradient of the decision function at each row of X.

        For the radial-basis kernel d/dx k(s, x) = -2 gamma (x - s) k(s, x);
        for the linear kernel the gradient is the constant weight vector.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        coeff = self.alphas * self.labels
        if self.kernel == LINEAR:
            w = coeff @ self.support_vectors
            return np.tile(w, (X.shape[0], 1))
        K = kernel_matrix(RBF, self.gamma, X, self.support_vectors)
        # (n, d) = sum_i coeff_i * k_i * (-2 gamma) * (x - sv_i)
        weighted = coeff[None, :] * K
        return -2.0 * self.gamma * (
            weighted.sum(axis=1)[:, None] * X - weighted @ self.support_vectors
        )


def train(
    X: np.ndarray,
    y: np.ndarray,
    C: float = 10.0,
    kernel: str = RBF,
    gamma: float = 2.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    max_iter: int = 10_000,
    sv_threshold: float = 1e-8,
    seed: int = 0,
) -> KernelClassifier:
    """Fit a soft-margin classifier on labelled points.

    Raises on single-class input; warns (and flags the classifier) when the
    optimizer hits the iteration cap before stabilizing.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, d) with one label per row")
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")

    rng = np.random.default_rng(seed)
    n = len(y)
    K = kernel_matrix(kernel, gamma, X, X)
    alphas = np.zeros(n)
    bias = 0.0
    passes = 0
    iters = 0

    def decision(i: int) -> float:
        return float((alphas * y) @ K[:, i] + bias)

    while passes < max_passes and iters < max_iter:
        iters += 1
        changed = 0
        for i in range(n):
            Ei = decision(i) - y[i]
            if not ((y[i] * Ei < -tol and alphas[i] < C)
                    or (y[i] * Ei > tol and alphas[i] > 0)):
                continue
            j = int(rng.integers(n - 1))
            if j >= i:
                j += 1
            Ej = decision(j) - y[j]
            ai_old, aj_old = alphas[i], alphas[j]
            if y[i] == y[j]:
                low, high = max(0.0, ai_old + aj_old - C), min(C, ai_old + aj_old)
            else:
                low, high = max(0.0, aj_old - ai_old), min(C, C + aj_old - ai_old)
            if high - low < 1e-12:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj = np.clip(aj_old - y[j] * (Ei - Ej) / eta, low, high)
            if abs(aj - aj_old) < 1e-7:
                continue
            ai = ai_old + y[i] * y[j] * (aj_old - aj)
            alphas[i], alphas[j] = ai, aj
            b1 = (bias - Ei - y[i] * (ai - ai_old) * K[i, i]
                  - y[j] * (aj - aj_old) * K[i, j])
            b2 = (bias - Ej - y[i] * (ai - ai_old) * K[i, j]
                  - y[j] * (aj - aj_old) * K[j, j])
            if 0 < ai < C:
                bias = b1
            elif 0 < aj < C:
                bias = b2
            else:
                bias = (b1 + b2) / 2.0
            changed += 1
        passes = passes + 1 if changed == 0 else 0
    converged = passes >= max_passes

    if not converged:
        warnings.warn(
            f"dual optimizer hit the iteration cap ({max_iter}) before "
            f"stabilizing; the classifier may be slightly off", RuntimeWarning)

    keep = alphas > sv_threshold
    classifier = KernelClassifier(
        support_vectors=X[keep].copy(),
        alphas=alphas[keep].copy(),
        labels=y[keep].astype(int),
        bias=float(bias),
        kernel=kernel,
        gamma=gamma,
        c_param=C,
        converged=converged,
    )
    accuracy = float(np.mean(classifier.predict(X) == y))
    object.__setattr__(classifier, "train_accuracy", accuracy)
    return classifier


def dual_feasible(c: KernelClassifier, tol: float = 1e-6) -> bool:
    """Box constraints on the dual weights: 0 <= alpha <= C."""
    return bool(np.all(c.alphas >= -tol) and np.all(c.alphas <= c.c_param + tol))
