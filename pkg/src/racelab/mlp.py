"""Small MLPs with hand-rolled reverse-mode gradients and Adam.

Everything is float64 numpy. Hidden layers use the rectifier; the output is
either hyperbolic tangent (actor) or identity (critic). Gradients are exact
reverse-mode derivatives of the forward map; correctness is pinned against a
finite-difference oracle in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SnapshotError

SNAPSHOT_MAGIC = "RLNET 1"


class Mlp:
    """Fully connected network ``sizes[0] -> ... -> sizes[-1]``.

    ``weights[i]`` has shape ``(sizes[i], sizes[i+1])``; inputs are row
    vectors or ``(batch, in)`` matrices.
    """

    def __init__(self, sizes, weights, biases, output_tanh: bool):
        self.sizes = tuple(int(s) for s in sizes)
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.biases = [np.asarray(b, dtype=float) for b in biases]
        self.output_tanh = bool(output_tanh)
        if len(self.weights) != len(self.sizes) - 1 or len(self.biases) != len(
            self.weights
        ):
            raise ValueError("layer count mismatch")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.sizes[i], self.sizes[i + 1]) or b.shape != (
                self.sizes[i + 1],
            ):
                raise ValueError(f"layer {i} has shape {w.shape}, want "
                                 f"({self.sizes[i]}, {self.sizes[i + 1]})")

    @classmethod
    def create(
        cls, sizes, rng: np.random.Generator, output_tanh: bool
    ) -> "Mlp":
        """Uniform fan-in initialization: U(-1/sqrt(n_in), 1/sqrt(n_in))."""
        weights, biases = [], []
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / math.sqrt(n_in)
            weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
            biases.append(rng.uniform(-bound, bound, size=n_out))
        return cls(sizes, weights, biases, output_tanh)

    def parameters(self) -> list[np.ndarray]:
        """Flat parameter list, weights and biases interleaved per layer."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def copy(self) -> "Mlp":
        return Mlp(
            self.sizes,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.output_tanh,
        )

    def _check_input(self, x: np.ndarray) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.sizes[0]:
            raise ValueError(
                f"input width {x.shape[-1]} does not match net input {self.sizes[0]}"
            )
        return x, single

    def forward(self, x: np.ndarray) -> np.ndarray:
        x, single = self._check_input(x)
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = h @ w + b
            if i < last:
                h = np.maximum(a, 0.0)
            else:
                h = np.tanh(a) if self.output_tanh else a
        return h[0] if single else h

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)

    def backward(
        self, x: np.ndarray, grad_out: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Exact gradients of ``sum(forward(x) * grad_out)``.

        Returns (parameter gradients matching :meth:`parameters`, gradient
        with respect to the input batch).
        """
        x, single = self._check_input(x)
        grad_out = np.asarray(grad_out, dtype=float)
        if single:
            grad_out = grad_out[None, :]
        if grad_out.shape != (x.shape[0], self.sizes[-1]):
            raise ValueError(
                f"grad_out shape {grad_out.shape} does not match "
                f"({x.shape[0]}, {self.sizes[-1]})"
            )
        # Forward with caches.
        hs = [x]  # layer inputs
        pre = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = h @ w + b
            pre.append(a)
            h = (
                np.maximum(a, 0.0)
                if i < last
                else (np.tanh(a) if self.output_tanh else a)
            )
            hs.append(h)
        # Backward.
        g = grad_out
        if self.output_tanh:
            g = g * (1.0 - hs[-1] ** 2)
        grads: list[np.ndarray] = [None] * (2 * len(self.weights))
        for i in range(last, -1, -1):
            grads[2 * i] = hs[i].T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.weights[i].T
            if i > 0:
                g = g * (pre[i - 1] > 0.0)
        return grads, (g[0] if single else g)

    def assert_finite(self) -> None:
        for p in self.parameters():
            if not np.all(np.isfinite(p)):
                raise FloatingPointError("network parameters are not finite")


# ---------------------------------------------------------------------------
# Adam


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per parameter array."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """In-place Adam update with bias correction."""
    state.t += 1
    c1 = 1.0 - beta1**state.t
    c2 = 1.0 - beta2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


# ---------------------------------------------------------------------------
# Snapshots


def save_snapshot(net: Mlp, path: str) -> None:
    """Versioned text snapshot; floats at 17 significant digits (round-trips
    64-bit values bit-exactly)."""
    lines = [SNAPSHOT_MAGIC]
    lines.append("sizes " + " ".join(str(s) for s in net.sizes))
    lines.append(f"output {'tanh' if net.output_tanh else 'identity'}")
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        lines.append(f"layer {i}")
        for row in w:
            lines.append(" ".join(f"{x:.17g}" for x in row))
        lines.append(" ".join(f"{x:.17g}" for x in b))
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_snapshot(path: str) -> Mlp:
    with open(path, "r", encoding="ascii") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != SNAPSHOT_MAGIC:
        raise SnapshotError(f"{path}: bad magic, expected {SNAPSHOT_MAGIC!r}")
    try:
        if not lines[1].startswith("sizes "):
            raise SnapshotError(f"{path}: missing sizes line")
        sizes = [int(x) for x in lines[1].split()[1:]]
        kind = lines[2].split()
        if kind[0] != "output" or kind[1] not in ("tanh", "identity"):
            raise SnapshotError(f"{path}: bad output activation line")
        output_tanh = kind[1] == "tanh"
        weights, biases = [], []
        k = 3
        for i, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            if lines[k] != f"layer {i}":
                raise SnapshotError(f"{path}: expected 'layer {i}' at line {k + 1}")
            k += 1
            rows = [
                np.array([float(x) for x in lines[k + r].split()]) for r in range(n_in)
            ]
            k += n_in
            w = np.vstack(rows)
            b = np.array([float(x) for x in lines[k].split()])
            k += 1
            if w.shape != (n_in, n_out) or b.shape != (n_out,):
                raise SnapshotError(f"{path}: layer {i} has wrong width")
            weights.append(w)
            biases.append(b)
    except (IndexError, ValueError) as exc:
        raise SnapshotError(f"{path}: truncated or malformed snapshot") from exc
    return Mlp(sizes, weights, biases, output_tanh)
