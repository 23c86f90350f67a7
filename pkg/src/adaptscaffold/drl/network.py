"""Fully connected Q-network (ReLU hidden layers, linear output) and Adam."""

from __future__ import annotations

import numpy as np


class ShapeMismatch(ValueError):
    pass


class QNetwork:
    def __init__(self, dims, weights=None, biases=None, rng: np.random.Generator | None = None):
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) < 2:
            raise ValueError("need at least input and output dimensions")
        if weights is None:
            rng = rng if rng is not None else np.random.default_rng(0)
            # He initialisation for ReLU layers
            weights = [
                rng.normal(0.0, np.sqrt(2.0 / a), size=(a, b)) for a, b in zip(self.dims[:-1], self.dims[1:])
            ]
            biases = [np.zeros(b) for b in self.dims[1:]]
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        for w, b, a, c in zip(self.weights, self.biases, self.dims[:-1], self.dims[1:]):
            if w.shape != (a, c) or b.shape != (c,):
                raise ShapeMismatch(f"layer expects {(a, c)}, got weight {w.shape} and bias {b.shape}")

    @property
    def params(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def copy(self) -> "QNetwork":
        return QNetwork(self.dims, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def load_from(self, other: "QNetwork") -> None:
        if other.dims != self.dims:
            raise ShapeMismatch(f"{other.dims} vs {self.dims}")
        for dst, src in zip(self.params, other.params):
            dst[...] = src

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self._forward(x)[0]

    __call__ = forward

    def _forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        h = x[None, :] if single else x
        if h.shape[1] != self.dims[0]:
            raise ShapeMismatch(f"input width {h.shape[1]} != {self.dims[0]}")
        acts = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = acts[-1] @ w + b
            acts.append(z if i == last else np.maximum(z, 0.0))
        out = acts[-1][0] if single else acts[-1]
        return out, acts

    def loss_and_grads(self, x: np.ndarray, actions: np.ndarray, targets: np.ndarray):
        """Mean squared error on the taken actions and its gradient for every parameter."""
        q, acts = self._forward(np.atleast_2d(x))
        n = q.shape[0]
        rows = np.arange(n)
        err = q[rows, actions] - targets
        loss = float(np.mean(err**2))
        delta = np.zeros_like(q)
        delta[rows, actions] = 2.0 * err / n
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            gw[i] = acts[i].T @ delta
            gb[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0)
        return loss, [*gw, *gb]

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.params)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "weights": [w.ravel(order="C").tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QNetwork":
        dims = d["dims"]
        ws = [np.asarray(w, dtype=np.float64).reshape(a, b) for w, a, b in zip(d["weights"], dims[:-1], dims[1:])]
        return cls(dims, ws, [np.asarray(b) for b in d["biases"]])


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads) -> None:
        self.t += 1
        c1 = 1 - self.beta1**self.t
        c2 = 1 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
