"""L2-regularised hinge-loss linear SVM.

Binary problems are solved in the dual by coordinate descent over the box
``0 <= alpha_i <= C * cw_i``. The bias is learned as the weight of a constant
feature of value 1 appended to every row, so it is regularised like any other
weight and the dual has no equality constraint. There is no shrinking.

Multiclass problems use one-vs-one voting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numba
import numpy as np

from .features import FeatureMatrix

__all__ = [
    "TrainConfig",
    "PairModel",
    "LinearModel",
    "class_weights",
    "primal_objective",
    "train_binary",
    "train",
    "decision_matrix",
    "predict",
]


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tol: float = 1e-4
    max_epochs: int = 1000
    balanced_weights: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be at least 1")


@dataclass
class PairModel:
    # (negative class, positive class); decision > 0 votes for the second
    class_pair: tuple[str, str]
    weights: np.ndarray
    bias: float
    dual_coeffs: np.ndarray
    epochs_run: int
    converged: bool = True
    # primal and dual objective after each epoch (index 0 = before the first)
    objective_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    dual_trace: np.ndarray = field(default_factory=lambda: np.empty(0))

    def decision(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias


@dataclass
class LinearModel:
    classes: list[str]
    pairs: list[PairModel]
    feature_names: list[str]
    config: TrainConfig = field(default_factory=TrainConfig)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "feature_names": list(self.feature_names),
            "config": asdict(self.config),
            "pairs": [
                {
                    "class_pair": list(p.class_pair),
                    "weights": [float(w) for w in p.weights],
                    "bias": float(p.bias),
                    "epochs_run": p.epochs_run,
                    "converged": p.converged,
                }
                for p in self.pairs
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearModel":
        pairs = [
            PairModel(
                tuple(p["class_pair"]),
                np.asarray(p["weights"], dtype=np.float64),
                float(p["bias"]),
                np.empty(0),
                int(p["epochs_run"]),
                bool(p.get("converged", True)),
            )
            for p in data["pairs"]
        ]
        return cls(list(data["classes"]), pairs, list(data["feature_names"]),
                   TrainConfig(**data["config"]))


def class_weights(labels: Sequence, balanced: bool) -> dict:
    """Per-class loss weights; ``n / (k * n_c)`` when balanced, else 1."""
    if len(labels) == 0:
        raise ValueError("labels must be non-empty")
    counts = Counter(labels)
    if not balanced:
        return {c: 1.0 for c in counts}
    n, k = len(labels), len(counts)
    return {c: n / (k * nc) for c, nc in counts.items()}


@numba.njit(cache=True)
def _splitmix64(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return state, z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _primal(Xa, y, upper, w):
    obj = 0.5 * np.dot(w, w)
    for i in range(Xa.shape[0]):
        margin = 1.0 - y[i] * np.dot(w, Xa[i])
        if margin > 0.0:
            obj += upper[i] * margin
    return obj


@numba.njit(cache=True)
def _dual_cd(Xa, y, upper, tol, max_epochs, seed, record):
    n, d = Xa.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    qii = np.empty(n)
    for i in range(n):
        qii[i] = np.dot(Xa[i], Xa[i])
    order = np.arange(n)
    trace = np.empty(max_epochs + 1)
    dual_trace = np.empty(max_epochs + 1)
    trace[0] = _primal(Xa, y, upper, w)
    dual_trace[0] = 0.0
    state = np.uint64(seed)
    epochs = 0
    converged = False
    for epoch in range(max_epochs):
        # Fisher-Yates shuffle driven by splitmix64
        for j in range(n - 1, 0, -1):
            state, r = _splitmix64(state)
            k = np.int64(r % np.uint64(j + 1))
            tmp = order[j]
            order[j] = order[k]
            order[k] = tmp
        max_violation = 0.0
        for s in range(n):
            i = order[s]
            g = y[i] * np.dot(w, Xa[i]) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = min(g, 0.0)
            elif a >= upper[i]:
                pg = max(g, 0.0)
            else:
                pg = g
            if abs(pg) > max_violation:
                max_violation = abs(pg)
            if pg != 0.0:
                new_a = min(max(a - g / qii[i], 0.0), upper[i])
                delta = (new_a - a) * y[i]
                if delta != 0.0:
                    for f in range(d):
                        w[f] += delta * Xa[i, f]
                    alpha[i] = new_a
        epochs = epoch + 1
        if record:
            trace[epochs] = _primal(Xa, y, upper, w)
            dual_trace[epochs] = np.sum(alpha) - 0.5 * np.dot(w, w)
        if max_violation < tol:
            converged = True
            break
    if not record:
        return alpha, w, epochs, converged, trace[:0], dual_trace[:0]
    return alpha, w, epochs, converged, trace[: epochs + 1], dual_trace[: epochs + 1]


def _as_array(X) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        return X.values
    return np.asarray(X, dtype=np.float64)


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def primal_objective(X, y, w: np.ndarray, bias: float, C: float = 1.0,
                     sample_weight: np.ndarray | None = None) -> float:
    """0.5 * (|w|^2 + bias^2) + C * sum_i cw_i * hinge_i."""
    X = _as_array(X)
    y = np.asarray(y, dtype=np.float64)
    cw = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    wa = np.append(np.asarray(w, dtype=np.float64), bias)
    return float(_primal(_augment(X), y, C * cw, wa))


def train_binary(
    X,
    y,
    cfg: TrainConfig = TrainConfig(),
    sample_weight: np.ndarray | None = None,
    class_pair: tuple[str, str] = ("-1", "+1"),
    seed_offset: int = 0,
    record_trace: bool = True,
) -> PairModel:
    """Fit one binary SVM on labels ``y`` in {-1, +1}.

    ``sample_weight`` scales each row's box bound (``C * sample_weight[i]``);
    class weights are passed through it. With ``record_trace`` the primal
    and dual objectives are stored after every epoch.
    """
    X = _as_array(X)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("X must be 2-D with one row per label")
    if np.isnan(X).any():
        raise ValueError("NaN in SVM input; scale features first")
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("binary labels must be -1 or +1")
    if not ((y > 0).any() and (y < 0).any()):
        raise ValueError("binary training needs rows from both classes")
    cw = np.ones(y.size) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    upper = cfg.C * cw
    seed = np.uint64((cfg.seed * 0x100000001B3 + seed_offset) % (1 << 64))
    alpha, wa, epochs, converged, trace, dual_trace = _dual_cd(
        np.ascontiguousarray(_augment(X)), y, upper, float(cfg.tol), int(cfg.max_epochs), seed,
        bool(record_trace),
    )
    return PairModel(
        class_pair=tuple(class_pair),
        weights=wa[:-1].copy(),
        bias=float(wa[-1]),
        dual_coeffs=alpha,
        epochs_run=int(epochs),
        converged=bool(converged),
        objective_trace=trace,
        dual_trace=dual_trace,
    )


def train(X, y: Sequence[str], cfg: TrainConfig = TrainConfig(),
          feature_names: Sequence[str] | None = None,
          classes: Sequence[str] | None = None) -> LinearModel:
    """One binary model per unordered class pair.

    Class order is ``classes`` if given, else order of first appearance in
    ``y``. Balanced class weights are computed once from the full ``y`` and
    reused by every pair.
    """
    Xv = _as_array(X)
    if feature_names is None:
        feature_names = X.columns if isinstance(X, FeatureMatrix) else [
            f"f{j}" for j in range(Xv.shape[1])]
    y = list(y)
    if classes is None:
        classes = list(dict.fromkeys(y))
    else:
        classes = [c for c in classes if c in set(y)]
    if len(classes) < 2:
        raise ValueError("training needs at least two classes")
    weights = class_weights(y, cfg.balanced_weights)
    labels = np.asarray(y, dtype=object)
    row_weight = np.array([weights[c] for c in y])
    pairs = []
    p = 0
    for a in range(len(classes)):
        for b in range(a + 1, len(classes)):
            neg, pos = classes[a], classes[b]
            rows = np.flatnonzero((labels == neg) | (labels == pos))
            yy = np.where(labels[rows] == pos, 1.0, -1.0)
            pairs.append(train_binary(Xv[rows], yy, cfg, row_weight[rows], (neg, pos), p,
                                      record_trace=False))
            p += 1
    return LinearModel(list(classes), pairs, list(feature_names), cfg)


def decision_matrix(model: LinearModel, X) -> np.ndarray:
    """Decision values, one column per pair model."""
    if isinstance(X, FeatureMatrix) and list(X.columns) != list(model.feature_names):
        raise ValueError("feature names differ from the training matrix")
    Xv = _as_array(X)
    if Xv.shape[1] != len(model.feature_names):
        raise ValueError("column count differs from the training matrix")
    W = np.stack([p.weights for p in model.pairs], axis=1)
    b = np.array([p.bias for p in model.pairs])
    return Xv @ W + b


def predict(model: LinearModel, X) -> list[str]:
    """One-vs-one vote.

    Ties on votes go to the tied class with the largest sum of |decision|
    over the pairs it won, then to the lowest class index.
    """
    D = decision_matrix(model, X)
    k = len(model.classes)
    index = {c: i for i, c in enumerate(model.classes)}
    n = D.shape[0]
    votes = np.zeros((n, k))
    strength = np.zeros((n, k))
    for j, pair in enumerate(model.pairs):
        neg, pos = index[pair.class_pair[0]], index[pair.class_pair[1]]
        d = D[:, j]
        winner = np.where(d > 0, pos, neg)
        votes[np.arange(n), winner] += 1
        strength[np.arange(n), winner] += np.abs(d)
    top = votes.max(axis=1, keepdims=True)
    tied = votes == top
    score = np.where(tied, strength, -np.inf)
    # argmax picks the first maximum, i.e. the lowest class index
    best = np.argmax(score, axis=1)
    return [model.classes[i] for i in best]
