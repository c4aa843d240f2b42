"""A small value network Q(s, a) trained by full-batch gradient descent.

Inputs are the three normalised state components plus a scalar action code;
the output is a single Q-value. Hidden layers use ReLU, the output is linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

LAYER_SIZES = (4, 40, 40, 1)
HIDDEN_BIAS = 0.1
OUTPUT_BIAS = 0.0
N_COLUMNS = 8  # con, fea, div, op, r, con', fea', div'
STATE_COLS = slice(0, 3)
OP_COL = 3
REWARD_COL = 4
NEXT_COLS = slice(5, 8)


@dataclass(frozen=True)
class TrainHyper:
    lr0: float = 0.01
    decay: float = 1e-4
    max_iters: int = 80_000
    gamma: float = 0.9

    def __post_init__(self):
        if not self.lr0 > 0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if self.decay < 0:
            raise ValueError(f"decay must be nonnegative, got {self.decay}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be nonnegative, got {self.max_iters}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")

    def learning_rate(self, t: int) -> float:
        return self.lr0 / (1.0 + self.decay * t)


def action_code(op, k: int = 2) -> float:
    """Scalar encoding of operator index ``op`` (1-based) in [0, 1]."""
    return (int(op) - 1) / (k - 1) if k > 1 else 0.0


@dataclass(frozen=True)
class NormStats:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lo, dtype=float)
        hi = np.array(self.hi, dtype=float)
        if lo.shape != (N_COLUMNS,) or hi.shape != (N_COLUMNS,):
            raise ValueError("NormStats needs one (min, max) pair per record column")
        if np.any(lo > hi):
            raise ValueError("NormStats min exceeds max")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_rows(cls, rows, k: int = 2) -> "NormStats":
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        lo, hi = rows.min(axis=0), rows.max(axis=0)
        # the action column has a fixed range so codes stay (index-1)/(k-1)
        lo[OP_COL], hi[OP_COL] = 1.0, float(max(k, 2))
        return cls(lo, hi)

    def normalize(self, rows, cols=slice(None)) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        lo, hi = self.lo[cols], self.hi[cols]
        span = hi - lo
        degenerate = span == 0
        out = (rows - lo) / np.where(degenerate, 1.0, span)
        return np.where(degenerate, 0.5, out)

    def denormalize(self, rows, cols=slice(None)) -> np.ndarray:
        rows = np.asarray(rows, dtype=float)
        lo, hi = self.lo[cols], self.hi[cols]
        return lo + rows * (hi - lo)

    def state_input(self, s) -> np.ndarray:
        """Normalise a raw (con, fea, div) triple for prediction, clamped to [0, 1]."""
        v = s.as_array() if hasattr(s, "as_array") else np.asarray(s, dtype=float)
        return np.clip(self.normalize(v, STATE_COLS), 0.0, 1.0)


@dataclass
class QNetwork:
    weights: list
    biases: list
    history: list = field(default_factory=list)

    @property
    def sizes(self) -> tuple:
        return (self.weights[0].shape[0],) + tuple(W.shape[1] for W in self.weights)

    def copy(self) -> "QNetwork":
        return QNetwork([W.copy() for W in self.weights], [b.copy() for b in self.biases],
                        list(self.history))

    def parameters(self) -> list:
        return [*self.weights, *self.biases]

    def _forward(self, X):
        acts = [X]
        pre = []
        a = X
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ W + b
            pre.append(z)
            a = np.maximum(z, 0.0) if i < last else z
            acts.append(a)
        return a[:, 0], pre, acts

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return self._forward(X)[0]

    def loss(self, X, y) -> float:
        diff = self.predict(X) - np.asarray(y, dtype=float)
        return float(np.mean(diff * diff))

    def loss_and_grads(self, X, y) -> tuple:
        """Mean squared error and its gradients, ordered as ``parameters()``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).reshape(-1)
        out, pre, acts = self._forward(X)
        diff = out - y
        loss = float(np.mean(diff * diff))
        delta = (2.0 / len(y)) * diff[:, None]
        gW = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            gW[i] = acts[i].T @ delta
            gb[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (pre[i - 1] > 0)
        return loss, gW + gb

    def relu_masks(self, X) -> list:
        _, pre, _ = self._forward(np.atleast_2d(np.asarray(X, dtype=float)))
        return [z > 0 for z in pre[:-1]]


def init_network(rng, sizes: Sequence[int] = LAYER_SIZES) -> QNetwork:
    """Weights uniform in [-0.5, 0.5] / sqrt(fan_in); hidden biases 0.1, output bias 0."""
    rng = np.random.default_rng(rng)
    weights, biases = [], []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        weights.append((rng.random((fan_in, fan_out)) - 0.5) / np.sqrt(fan_in))
        hidden = i < len(sizes) - 2
        biases.append(np.full(fan_out, HIDDEN_BIAS if hidden else OUTPUT_BIAS))
    return QNetwork(weights, biases)


def forward(net: QNetwork, s_norm, a_norm) -> float:
    x = np.concatenate([np.asarray(s_norm, dtype=float).reshape(-1), [float(a_norm)]])
    return float(net.predict(x)[0])


def records_matrix(records) -> np.ndarray:
    return np.vstack([t.as_row() if hasattr(t, "as_row") else np.asarray(t, dtype=float)
                      for t in records])


def _inputs(rows_norm: np.ndarray) -> np.ndarray:
    return np.column_stack([rows_norm[:, STATE_COLS], rows_norm[:, OP_COL]])


def compute_targets(net: QNetwork, records, norm: NormStats, gamma: float, k: int = 2) -> np.ndarray:
    """``r + gamma * max_a' Q(s', a')`` for every record, on normalised data."""
    rows = norm.normalize(records_matrix(records))
    r = rows[:, REWARD_COL]
    if gamma == 0:
        return r.copy()
    s_next = rows[:, NEXT_COLS]
    q_next = np.column_stack([
        net.predict(np.column_stack([s_next, np.full(len(rows), action_code(a, k))]))
        for a in range(1, k + 1)
    ])
    return r + gamma * q_next.max(axis=1)


def training_data(net: QNetwork, records, hyper: TrainHyper, k: int = 2) -> tuple:
    """Normalisation statistics, network inputs and frozen targets for one session."""
    raw = records_matrix(records)
    norm = NormStats.from_rows(raw, k)
    X = _inputs(norm.normalize(raw))
    y = compute_targets(net, records, norm, hyper.gamma, k)
    return norm, X, y


def train_session(net: Optional[QNetwork], records, hyper: TrainHyper, rng=None, k: int = 2) -> tuple:
    """Fit ``net`` (a fresh one when None) to the sampled records.

    Targets are built once from the pre-session network. Returns the trained
    copy and the statistics used to normalise its inputs; the copy's
    ``history`` gains an (initial loss, final loss) pair.
    """
    if net is None:
        net = init_network(rng)
    net = net.copy()
    norm, X, y = training_data(net, records, hyper, k)
    params = net.parameters()
    first = None
    for t in range(hyper.max_iters):
        loss, grads = net.loss_and_grads(X, y)
        if first is None:
            first = loss
        lr = hyper.learning_rate(t)
        for p, g in zip(params, grads):
            p -= lr * g
    final = net.loss(X, y)
    net.history.append((final if first is None else first, final))
    return net, norm


def _extended_loss(weights, biases, X, y) -> tuple:
    """Loss and ReLU on/off masks computed in extended precision."""
    a = X
    masks = []
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        if i < last:
            masks.append(z > 0)
            a = np.maximum(z, 0)
        else:
            a = z
    diff = a[:, 0] - y
    return np.mean(diff * diff), masks


def gradient_check(net: QNetwork, sample_input, sample_target, h: float = 1e-5) -> float:
    """Largest relative gap between backprop and central-difference gradients.

    The perturbed losses are evaluated in extended precision so that round-off
    in the difference quotient stays well below the tolerance even for tiny
    gradients. Parameters whose perturbation flips any ReLU on/off are skipped,
    since the loss is not differentiable across that kink.
    """
    X = np.atleast_2d(np.asarray(sample_input, dtype=float))
    y = np.asarray(sample_target, dtype=float).reshape(-1)
    _, grads = net.loss_and_grads(X, y)

    ext = np.longdouble
    weights = [W.astype(ext) for W in net.weights]
    biases = [b.astype(ext) for b in net.biases]
    Xe, ye, he = X.astype(ext), y.astype(ext), ext(h)
    _, base_masks = _extended_loss(weights, biases, Xe, ye)

    def same(masks):
        return all(np.array_equal(a, b) for a, b in zip(base_masks, masks))

    worst = 0.0
    for p, g in zip(weights + biases, grads):
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + he
            up, up_masks = _extended_loss(weights, biases, Xe, ye)
            p[idx] = orig - he
            down, down_masks = _extended_loss(weights, biases, Xe, ye)
            p[idx] = orig
            if not (same(up_masks) and same(down_masks)):
                continue
            numeric = float((up - down) / (2 * he))
            analytic = float(g[idx])
            denom = abs(analytic) + abs(numeric)
            if denom < 1e-8:
                continue
            worst = max(worst, abs(analytic - numeric) / denom)
    return worst


def dump_weights(net: QNetwork, path) -> None:
    """Write every layer as a block of row-major values, 9 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, (W, b) in enumerate(zip(net.weights, net.biases)):
            fh.write(f"# layer {i} weights {W.shape[0]}x{W.shape[1]}\n")
            for row in W:
                fh.write(" ".join(f"{v:.9g}" for v in row) + "\n")
            fh.write(f"# layer {i} bias {b.size}\n")
            fh.write(" ".join(f"{v:.9g}" for v in b) + "\n\n")
