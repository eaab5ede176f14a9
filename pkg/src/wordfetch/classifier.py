"""Per-word binary logistic classifier over the 6-feature schema.

Each vocabulary word owns one of these. The estimator follows the familiar
fit / partial_fit / predict_proba surface so it composes with generic
tooling, but the optimizer is deliberately hand-rolled: training must be
bit-for-bit reproducible and its analytic gradient is cross-checked against
finite differences in the test suite.

Objective for ``fit``: summed cross-entropy plus (lam/2)*||w||^2, minimized
by full-batch gradient descent on the 1/N-scaled objective (the scaling
keeps lr=0.5 stable for any batch size up to the buffer capacity).
``partial_fit`` is one unregularized SGD step.
"""

from collections import deque

import numpy as np

from .errors import InvalidInputError
from .features import N_FEATURES

BUFFER_CAPACITY = 500

# float bounds keeping responses strictly inside (0, 1)
_P_LO = 5e-324
_P_HI = np.nextafter(1.0, 0.0)


def sigmoid(z):
    # piecewise form avoids overflow in exp for large |z|
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        zf = float(z)
        if zf >= 0:
            return 1.0 / (1.0 + np.exp(-zf))
        ez = np.exp(zf)
        return ez / (1.0 + ez)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_x(x):
    arr = np.asarray(x, dtype=float)
    if arr.shape != (N_FEATURES,):
        raise InvalidInputError(f"expected {N_FEATURES} feature components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"non-finite feature component in {arr.tolist()}")
    return arr


class WordClassifier:
    """Binary classifier giving p(word applies | object features).

    Untrained state is all-zero weights and bias, i.e. response 0.5
    everywhere. Keeps a bounded FIFO buffer of the labeled examples it has
    seen so the word can later be retrained or merged.
    """

    def __init__(self, token, lam=0.01, lr=0.5, max_epochs=500, grad_tol=1e-6):
        self.token = token
        self.lam = lam
        self.lr = lr
        self.max_epochs = max_epochs
        self.grad_tol = grad_tol
        self.weights = np.zeros(N_FEATURES)
        self.bias = 0.0
        self.pos_count = 0
        self.neg_count = 0
        self.buffer = deque(maxlen=BUFFER_CAPACITY)

    # -- sklearn-flavored surface -------------------------------------------

    def get_params(self, deep=True):
        return {
            "token": self.token,
            "lam": self.lam,
            "lr": self.lr,
            "max_epochs": self.max_epochs,
            "grad_tol": self.grad_tol,
        }

    def set_params(self, **params):
        for key, value in params.items():
            if key not in self.get_params():
                raise InvalidInputError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def predict_proba(self, X):
        """Response for each row of X, shape (n, 2) as [1-p, p]."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        p = np.array([self.response(row) for row in X])
        return np.column_stack([1.0 - p, p])

    # -- core operations -----------------------------------------------------

    def response(self, x):
        """sigmoid(w·x + b), clamped strictly inside (0, 1)."""
        x = _check_x(x)
        p = float(sigmoid(np.array(float(np.dot(self.weights, x)) + self.bias)))
        return min(max(p, _P_LO), _P_HI)

    def fit(self, X, y):
        """Full-batch gradient descent from zero init on (X, y).

        Replaces the current weights; does not touch the buffer or counts
        (the lexicon layer owns that bookkeeping).
        """
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or X.shape[1] != N_FEATURES or len(X) != len(y):
            raise InvalidInputError("fit expects (n, 6) features and n labels")
        if len(X) == 0:
            raise InvalidInputError("fit expects at least one example")
        n = len(y)
        w = np.zeros(N_FEATURES)
        b = 0.0
        for _ in range(self.max_epochs):
            p = sigmoid(X @ w + b)
            grad_w = (X.T @ (p - y) + self.lam * w) / n
            grad_b = float(np.sum(p - y)) / n
            if max(np.max(np.abs(grad_w)), abs(grad_b)) < self.grad_tol:
                break
            w -= self.lr * grad_w
            b -= self.lr * grad_b
        self.weights = w
        self.bias = b
        return self

    def partial_fit(self, x, label, lr=0.1):
        """One unregularized SGD step on a single labeled example."""
        if lr <= 0:
            raise InvalidInputError(f"lr must be positive, got {lr}")
        if label not in (0, 1):
            raise InvalidInputError(f"label must be 0 or 1, got {label!r}")
        x = _check_x(x)
        p = self.response(x)
        err = label - p
        self.weights = self.weights + lr * err * x
        self.bias = self.bias + lr * err
        return self

    def loss_gradient(self, X, y, weights=None, bias=None):
        """Analytic gradient of the 1/N-scaled training objective.

        Exposed so the finite-difference check exercises exactly what
        ``fit`` descends.
        """
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        w = self.weights if weights is None else np.asarray(weights, dtype=float)
        b = self.bias if bias is None else float(bias)
        n = len(y)
        p = sigmoid(X @ w + b)
        return (X.T @ (p - y) + self.lam * w) / n, float(np.sum(p - y)) / n

    def loss(self, X, y, weights=None, bias=None):
        """1/N-scaled objective value matching ``loss_gradient``."""
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        w = self.weights if weights is None else np.asarray(weights, dtype=float)
        b = self.bias if bias is None else float(bias)
        z = X @ w + b
        # log(1+exp(±z)) in a numerically safe form
        ce = np.sum(np.logaddexp(0.0, -z) * y + np.logaddexp(0.0, z) * (1.0 - y))
        return float(ce + 0.5 * self.lam * np.dot(w, w)) / len(y)

    def is_trained(self):
        return bool(np.any(self.weights != 0.0) or self.bias != 0.0)

    def record_examples(self, pairs):
        """Append (x, label) pairs to the bounded buffer and bump counts."""
        for x, label in pairs:
            self.buffer.append((np.asarray(x, dtype=float).copy(), int(label)))
            if label == 1:
                self.pos_count += 1
            else:
                self.neg_count += 1

    def copy(self):
        dup = WordClassifier(self.token, self.lam, self.lr, self.max_epochs, self.grad_tol)
        dup.weights = self.weights.copy()
        dup.bias = self.bias
        dup.pos_count = self.pos_count
        dup.neg_count = self.neg_count
        dup.buffer = deque((x.copy(), y) for x, y in self.buffer)
        dup.buffer = deque(dup.buffer, maxlen=BUFFER_CAPACITY)
        return dup
