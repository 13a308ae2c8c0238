"""A small multilayer perceptron regressor trained on mean squared error.

Hidden layers use tanh, the output is a sigmoid so predictions stay in
(0, 1).  Everything is float64 numpy; backprop is written out by hand and
checked against central differences by :func:`grad_check`.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import rng as rngmod
from .cards import NUM_RANKS, CanonicalHand

CHECKPOINT_VERSION = 1


class ShapeError(ValueError):
    pass


class TrainingDiverged(RuntimeError):
    def __init__(self, update: int, loss: float):
        super().__init__(f"training diverged at update {update} (loss={loss})")
        self.update = update


_ACT = {
    "tanh": (np.tanh, lambda a: 1.0 - a * a),
    "softplus": (lambda z: np.logaddexp(0.0, z), lambda a: -np.expm1(-a)),
}


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class Network:
    sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "tanh"

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def arrays(self) -> list[np.ndarray]:
        """Parameter arrays in a fixed order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> Network:
        return Network(self.sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases], self.activation)

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays())


def init_network(sizes: Sequence[int], seed: int = 0, activation: str = "tanh") -> Network:
    """Glorot-uniform weights, zero biases."""
    if activation not in _ACT:
        raise ValueError(f"unknown activation {activation!r}")
    sizes = tuple(int(s) for s in sizes)
    gen = rngmod.stream(seed, rngmod.tag("init"))
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(gen.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Network(sizes, weights, biases, activation)


def zero_network(sizes: Sequence[int], activation: str = "tanh") -> Network:
    sizes = tuple(sizes)
    return Network(
        sizes,
        [np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])],
        [np.zeros(b) for b in sizes[1:]],
        activation,
    )


def _check(net: Network, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[-1] != net.sizes[0]:
        raise ShapeError(f"expected {net.sizes[0]} input features, got {X.shape[-1]}")
    return X


def _activations(net: Network, X: np.ndarray) -> list[np.ndarray]:
    act = _ACT[net.activation][0]
    acts = [X]
    a = X
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        a = sigmoid(z) if i == last else act(z)
        acts.append(a)
    return acts


def forward(net: Network, X) -> np.ndarray:
    """Predictions in (0, 1), one per row of ``X``."""
    return _activations(net, _check(net, X))[-1][:, 0]


def loss(net: Network, X, y) -> float:
    """Mean of (prediction - target)^2 over the batch."""
    X = _check(net, X)
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(y) == 0:
        raise ValueError("loss of an empty batch")
    if len(y) != len(X):
        raise ShapeError(f"{len(X)} inputs but {len(y)} targets")
    return float(np.mean((forward(net, X) - y) ** 2))


def gradients(net: Network, X, y) -> tuple[float, list[np.ndarray]]:
    """Loss and its gradient, laid out like :meth:`Network.arrays`."""
    X = _check(net, X)
    y = np.asarray(y, dtype=float).reshape(-1, 1)
    if len(y) == 0:
        raise ValueError("gradient of an empty batch")
    dact = _ACT[net.activation][1]
    acts = _activations(net, X)
    p = acts[-1]
    diff = p - y
    n = len(y)
    value = float(np.mean(diff * diff))
    delta = (2.0 / n) * diff * p * (1.0 - p)
    grads: list[np.ndarray] = []
    for i in range(len(net.weights) - 1, -1, -1):
        grads.append(delta.sum(axis=0))
        grads.append(acts[i].T @ delta)
        if i:
            delta = (delta @ net.weights[i].T) * dact(acts[i])
    grads.reverse()
    return value, grads


def grad_check(
    net: Network,
    X,
    y,
    epsilon: float = 1e-4,
    n_params: int = 200,
    seed: int = 0,
    grad_fn: Callable = gradients,
) -> float:
    """Max relative error between ``grad_fn`` and central differences over a
    random subset of at least ``n_params`` parameters (all if fewer)."""
    if not 1e-6 <= epsilon <= 1e-3:
        raise ValueError("epsilon must lie in [1e-6, 1e-3]")
    _, analytic = grad_fn(net, X, y)
    probe = net.copy()
    arrays = probe.arrays()
    sizes = [a.size for a in arrays]
    total = sum(sizes)
    gen = rngmod.stream(seed, rngmod.tag("grad_check"))
    picks = np.arange(total) if total <= n_params else np.sort(gen.choice(total, n_params, replace=False))
    offsets = np.cumsum([0] + sizes)
    worst = 0.0
    for flat in picks.tolist():
        j = int(np.searchsorted(offsets, flat, side="right") - 1)
        arr, idx = arrays[j].reshape(-1), flat - offsets[j]
        old = arr[idx]
        arr[idx] = old + epsilon
        up = loss(probe, X, y)
        arr[idx] = old - epsilon
        down = loss(probe, X, y)
        arr[idx] = old
        numeric = (up - down) / (2 * epsilon)
        a = analytic[j].reshape(-1)[idx]
        denom = max(abs(a) + abs(numeric), 1e-7)
        worst = max(worst, abs(a - numeric) / denom)
    return worst


class SGD:
    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        for p, g in zip(params, grads):
            p -= self.lr * g


class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m: list[np.ndarray] | None = None
        self.v: list[np.ndarray] | None = None

    def step(self, params, grads):
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


# ---------------------------------------------------------------- features

class OneHotEncoder:
    """One-hot over a fixed list of observable ids."""

    id = "onehot"

    def __init__(self, observables: Sequence[int]):
        self.observables = [int(x) for x in observables]
        self.dim = len(self.observables)
        self._pos = {x: i for i, x in enumerate(self.observables)}
        self._dense = None
        if self.observables == list(range(self.dim)):
            self._dense = np.arange(self.dim)
        self._eye = np.eye(self.dim)

    def __call__(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if self._dense is not None:
            return self._eye[xs]
        return self._eye[[self._pos[int(x)] for x in xs]]


class CompactHandEncoder:
    """27 features for canonical poker hands: high-rank one-hot, low-rank
    one-hot and a suited flag.  Observables are class indices into ``hands``."""

    id = "compact"
    dim = 2 * NUM_RANKS + 1

    def __init__(self, hands: Sequence[CanonicalHand]):
        table = np.zeros((len(hands), self.dim))
        for i, h in enumerate(hands):
            table[i, h.high_rank] = 1.0
            table[i, NUM_RANKS + h.low_rank] = 1.0
            table[i, -1] = float(h.suited)
        self._table = table

    def __call__(self, xs) -> np.ndarray:
        return self._table[np.asarray(xs, dtype=np.int64)]


# ---------------------------------------------------------------- training

@dataclass
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    max_updates: int = 20_000
    epochs: int | None = None
    eval_every: int = 250
    patience: int = 20
    seed: int = 0
    hidden: tuple[int, ...] = (64, 64)
    activation: str = "tanh"

    def __post_init__(self):
        self.hidden = tuple(self.hidden)
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        for name in ("batch_size", "max_updates", "eval_every", "patience"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs is not None and self.epochs < 1:
            raise ValueError("epochs must be >= 1")


@dataclass(frozen=True)
class TrajectoryPoint:
    updates: int
    evaluations: int
    mae: float
    mse: float
    mae_weighted: float
    mse_weighted: float


@dataclass
class Trajectory:
    points: list[TrajectoryPoint] = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def best(self, metric: str = "mae", max_updates: int | None = None) -> TrajectoryPoint:
        pts = [p for p in self.points if max_updates is None or p.updates <= max_updates]
        return min(pts, key=lambda p: (getattr(p, metric), p.updates))

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["updates", "evaluations", "mae", "mse"])
            for p in self.points:
                w.writerow([p.updates, p.evaluations, f"{p.mae:.9f}", f"{p.mse:.9f}"])


class Validator:
    """Errors of a network against exact values on every observable."""

    def __init__(self, observables, truths, weights, encoder):
        self.X = encoder(observables)
        self.truths = np.asarray(truths, dtype=float)
        self.weights = np.asarray(weights, dtype=float)

    def __call__(self, net: Network) -> tuple[float, float, float, float]:
        err = forward(net, self.X) - self.truths
        a, s = np.abs(err), err * err
        return float(a.mean()), float(s.mean()), float(a @ self.weights), float(s @ self.weights)


@dataclass
class TrainResult:
    params: Network  # best validation snapshot
    final: Network
    trajectory: Trajectory
    updates: int
    stopped_early: bool
    wallclock_s: float


def train(
    net: Network,
    observables,
    targets,
    encoder: Callable,
    config: TrainConfig,
    validator: Validator,
    evaluations: int = 0,
) -> TrainResult:
    """Mini-batch training on (observable, target) pairs.

    Validation runs every ``config.eval_every`` updates (and at update 0);
    training stops at ``max_updates``, after ``epochs`` passes, or once
    ``patience`` consecutive checks fail to improve the best MAE.
    """
    start = time.perf_counter()
    xs = np.asarray(observables, dtype=np.int64)
    ys = np.asarray(targets, dtype=float)
    n = len(xs)
    if n == 0:
        raise ValueError("cannot train on an empty dataset")
    net = net.copy()
    params = net.arrays()
    opt = Adam(config.learning_rate) if config.optimizer == "adam" else SGD(config.learning_rate)
    gen = rngmod.stream(config.seed, rngmod.tag("train"))
    bs = min(config.batch_size, n)
    per_epoch = -(-n // bs)
    limit = config.max_updates
    if config.epochs is not None:
        limit = min(limit, config.epochs * per_epoch)

    traj = Trajectory()
    best_mae = math.inf
    best = net.copy()
    stale = 0

    def check(updates):
        nonlocal best_mae, best, stale
        mae, mse, wmae, wmse = validator(net)
        traj.points.append(TrajectoryPoint(updates, evaluations, mae, mse, wmae, wmse))
        if mae < best_mae:
            best_mae, best, stale = mae, net.copy(), 0
        else:
            stale += 1
        return stale >= config.patience

    check(0)
    updates = 0
    stopped = False
    order = gen.permutation(n)
    pos = 0
    while updates < limit:
        if pos + bs > n:
            order = gen.permutation(n)
            pos = 0
        idx = order[pos : pos + bs]
        pos += bs
        value, grads = gradients(net, encoder(xs[idx]), ys[idx])
        if not math.isfinite(value):
            raise TrainingDiverged(updates + 1, value)
        opt.step(params, grads)
        updates += 1
        if not all(np.isfinite(p).all() for p in params):
            raise TrainingDiverged(updates, value)
        if updates % config.eval_every == 0 or updates == limit:
            if check(updates):
                stopped = True
                break
    return TrainResult(best, net, traj, updates, stopped, time.perf_counter() - start)


# ---------------------------------------------------------------- checkpoints

def save_checkpoint(path: str | Path, net: Network, config: TrainConfig | None = None, **extra) -> None:
    """JSON checkpoint; floats are written with full round-trip precision."""
    doc = {
        "format": "infoset_budget.mlp",
        "version": CHECKPOINT_VERSION,
        "sizes": list(net.sizes),
        "activation": net.activation,
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "config": asdict(config) if config is not None else None,
        "seed": config.seed if config is not None else None,
        **extra,
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_checkpoint(path: str | Path) -> tuple[Network, dict]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "infoset_budget.mlp" or doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: not a version-{CHECKPOINT_VERSION} checkpoint")
    net = Network(
        tuple(doc["sizes"]),
        [np.array(w, dtype=float) for w in doc["weights"]],
        [np.array(b, dtype=float) for b in doc["biases"]],
        doc["activation"],
    )
    return net, doc
