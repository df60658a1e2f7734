"""Evaluation protocols: stratified train/test resampling and repeated stratified k-fold CV.

Both protocols fit the feature scaler on training rows only, train a linear
SVM, and score held-out rows. Resample and fold plans are pure functions of
their inputs and seed, so competing feature sets can be scored on
identical splits.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .features import (
    FeatureMatrix,
    FeatureSet,
    ScalerParams,
    apply_scaler,
    extract_matrix,
    fit_scaler,
    read_feature_csv,
)
from .svm import LinearModel, TrainConfig, predict, train
from .tsio import Problem, validate

__all__ = [
    "ProblemExcluded",
    "ResamplePlan",
    "FoldPlan",
    "EvalResult",
    "accuracy",
    "balanced_accuracy",
    "chance_level",
    "stratified_resamples",
    "problem_features",
    "fit_on_rows",
    "run_resample_eval",
    "repeated_stratified_kfold",
    "fold_plan_hash",
    "run_cv_eval",
    "permutation_null",
    "permutation_pvalue",
]

_PERM_STREAM = 0x5045524D


class ProblemExcluded(Exception):
    """The problem cannot be evaluated with the requested feature set."""


@dataclass(frozen=True)
class ResamplePlan:
    resample_index: int
    train_indices: np.ndarray
    test_indices: np.ndarray


@dataclass(frozen=True)
class FoldPlan:
    repeat_index: int
    folds: np.ndarray  # fold id per instance

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)


@dataclass
class EvalResult:
    problem: str
    feature_set: str
    metric: str
    values: list[float]
    seed: int
    protocol: str = "resample"
    n_train: int | None = None
    n_test: int | None = None
    k: int | None = None
    r: int | None = None
    fold_values: list[list[float]] | None = None
    fold_plan_hash: str | None = None
    class_counts: dict[str, int] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    timing_s: float = 0.0

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def sd(self) -> float:
        return float(np.std(self.values, ddof=1)) if len(self.values) > 1 else 0.0

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "feature_set": self.feature_set,
            "protocol": self.protocol,
            "metric": self.metric,
            "values": list(self.values),
            "seed": self.seed,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "k": self.k,
            "r": self.r,
            "fold_values": self.fold_values,
            "fold_plan_hash": self.fold_plan_hash,
            "class_counts": self.class_counts,
            "config": self.config,
            "timing_s": self.timing_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalResult":
        return cls(
            problem=d["problem"], feature_set=d["feature_set"], metric=d["metric"],
            values=list(d["values"]), seed=d["seed"], protocol=d.get("protocol", "resample"),
            n_train=d.get("n_train"), n_test=d.get("n_test"), k=d.get("k"), r=d.get("r"),
            fold_values=d.get("fold_values"), fold_plan_hash=d.get("fold_plan_hash"),
            class_counts=d.get("class_counts", {}), config=d.get("config", {}),
            timing_s=d.get("timing_s", 0.0),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def csv_rows(self) -> list[tuple[str, str, int, str, float]]:
        """Rows of the flat ``problem,feature_set,resample,metric,value`` table."""
        return [(self.problem, self.feature_set, i, self.metric, v)
                for i, v in enumerate(self.values)]


def accuracy(predicted: Sequence, actual: Sequence) -> float:
    if len(predicted) != len(actual) or not actual:
        raise ValueError("need equal, non-zero numbers of predictions and labels")
    p, a = np.asarray(predicted, dtype=object), np.asarray(actual, dtype=object)
    return float(np.mean(p == a))


def balanced_accuracy(predicted: Sequence, actual: Sequence,
                      classes: Sequence | None = None) -> float:
    """Unweighted mean of per-class recall over ``classes`` (default: classes in ``actual``)."""
    if len(predicted) != len(actual) or not actual:
        raise ValueError("need equal, non-zero numbers of predictions and labels")
    p, a = np.asarray(predicted, dtype=object), np.asarray(actual, dtype=object)
    classes = list(dict.fromkeys(actual)) if classes is None else list(classes)
    recalls = []
    for c in classes:
        mask = a == c
        if not mask.any():
            raise ValueError(f"class {c!r} absent from actual labels")
        recalls.append(np.mean(p[mask] == c))
    return float(np.mean(recalls))


def chance_level(problem: Problem, mode: str = "majority") -> float:
    counts = problem.class_counts("all")
    return _chance_from_counts(counts, mode)


def _chance_from_counts(counts: Mapping[str, int], mode: str) -> float:
    if mode == "majority":
        return max(counts.values()) / sum(counts.values())
    if mode == "uniform":
        return 1.0 / len(counts)
    raise ValueError(f"unknown chance mode {mode!r}")


def stratified_resamples(problem: Problem, n: int = 30, seed: int = 0) -> list[ResamplePlan]:
    """Plan 0 is the designated split; plans i >= 1 reshuffle each class independently.

    For each class, its designated-train then designated-test indices are
    pooled, shuffled with a generator seeded by ``(seed, i, class index)``, and
    the first designated-train-count go to train. Indices refer to
    ``problem.instances`` and are returned sorted.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    n_train = len(problem.train)
    labels = problem.labels
    plans = [ResamplePlan(0, np.arange(n_train), np.arange(n_train, len(labels)))]
    per_class = []
    for c in problem.classes:
        members = np.array([i for i, lab in enumerate(labels) if lab == c], dtype=np.int64)
        per_class.append((members, int(np.count_nonzero(members < n_train))))
    for i in range(1, n):
        train_idx, test_idx = [], []
        for ci, (members, n_tr) in enumerate(per_class):
            rng = np.random.default_rng([seed, i, ci])
            shuffled = rng.permutation(members)
            train_idx.append(shuffled[:n_tr])
            test_idx.append(shuffled[n_tr:])
        plans.append(ResamplePlan(i, np.sort(np.concatenate(train_idx)),
                                  np.sort(np.concatenate(test_idx))))
    return plans


def problem_features(problem: Problem, fs: FeatureSet, fast_dft: bool = False) -> FeatureMatrix:
    """Feature rows for ``problem.instances`` (train first, then test)."""
    if fs.kind == "external":
        return read_feature_csv(fs.source, problem.labels)
    return extract_matrix(problem.instances, fs, fast_dft=fast_dft)


def fit_on_rows(matrix: FeatureMatrix, labels: Sequence[str], rows: np.ndarray,
                cfg: TrainConfig, classes: Sequence[str] | None = None
                ) -> tuple[ScalerParams, LinearModel]:
    """Fit scaler and SVM using only ``rows``; nothing else in ``matrix`` is read."""
    train_m = matrix.take(rows)
    params = fit_scaler(train_m)
    scaled = apply_scaler(params, train_m)
    y = [labels[i] for i in rows]
    model = train(scaled, y, cfg, classes=classes)
    return params, model


def _score_rows(matrix, labels, params, model, rows, metric, classes=None) -> float:
    scaled = apply_scaler(params, matrix.take(rows))
    pred = predict(model, scaled)
    actual = [labels[i] for i in rows]
    if metric == "accuracy":
        return accuracy(pred, actual)
    return balanced_accuracy(pred, actual)


def run_resample_eval(
    problem: Problem,
    fs: FeatureSet,
    cfg: TrainConfig = TrainConfig(),
    n: int = 30,
    seed: int = 0,
    fast_dft: bool = False,
    matrix: FeatureMatrix | None = None,
) -> EvalResult:
    """Test-set accuracy on each of ``n`` stratified resamples.

    Raises :class:`ProblemExcluded` when dynamics features are requested for
    a problem holding series with too few real values, or when any feature
    column is entirely NaN within a training partition.
    """
    start = time.perf_counter()
    if fs.uses_dyn10:
        report = validate(problem)
        if report.short_instances:
            raise ProblemExcluded(
                f"{len(report.short_instances)} series with fewer than 10 real values"
            )
    if matrix is None:
        matrix = problem_features(problem, fs, fast_dft=fast_dft)
    labels = problem.labels
    plans = stratified_resamples(problem, n, seed)
    values = []
    for plan in plans:
        nan_cols = np.all(np.isnan(matrix.values[plan.train_indices]), axis=0)
        if nan_cols.any():
            bad = [c for c, flag in zip(matrix.columns, nan_cols) if flag]
            raise ProblemExcluded(
                f"resample {plan.resample_index}: all-NaN training column(s) {bad}"
            )
        params, model = fit_on_rows(matrix, labels, plan.train_indices, cfg, problem.classes)
        values.append(_score_rows(matrix, labels, params, model, plan.test_indices, "accuracy"))
    return EvalResult(
        problem=problem.name,
        feature_set=fs.name,
        metric="accuracy",
        values=values,
        seed=seed,
        protocol="resample",
        n_train=len(problem.train),
        n_test=len(problem.test),
        class_counts=problem.class_counts("all"),
        config=_cfg_dict(cfg),
        timing_s=time.perf_counter() - start,
    )


def _cfg_dict(cfg: TrainConfig) -> dict:
    return {"C": cfg.C, "tol": cfg.tol, "max_epochs": cfg.max_epochs,
            "balanced_weights": cfg.balanced_weights, "seed": cfg.seed}


def repeated_stratified_kfold(labels: Sequence[str], k: int = 10, r: int = 10,
                              seed: int = 0) -> list[FoldPlan]:
    """``r`` class-stratified k-fold assignments.

    In repeat j, each class's members are shuffled with a generator seeded by
    ``(seed, j, class index)`` and dealt round-robin into folds. The deal for
    each class starts where the previous class stopped, which keeps total
    fold sizes within one of each other as well.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    labels = list(labels)
    classes = list(dict.fromkeys(labels))
    members = []
    for c in classes:
        idx = np.array([i for i, lab in enumerate(labels) if lab == c], dtype=np.int64)
        if idx.size < k:
            raise ValueError(f"class {c!r} has {idx.size} members, fewer than k={k}")
        members.append(idx)
    plans = []
    for j in range(r):
        folds = np.empty(len(labels), dtype=np.int64)
        offset = 0
        for ci, idx in enumerate(members):
            rng = np.random.default_rng([seed, j, ci])
            shuffled = rng.permutation(idx)
            folds[shuffled] = (offset + np.arange(idx.size)) % k
            offset += idx.size
        plans.append(FoldPlan(j, folds))
    return plans


def fold_plan_hash(plans: Sequence[FoldPlan]) -> str:
    h = hashlib.sha256()
    for plan in plans:
        h.update(plan.folds.astype("<i8").tobytes())
    return h.hexdigest()


def run_cv_eval(
    matrix: FeatureMatrix,
    labels: Sequence[str],
    cfg: TrainConfig = TrainConfig(balanced_weights=True),
    k: int = 10,
    r: int = 10,
    seed: int = 0,
    name: str = "",
    feature_set: str = "",
) -> EvalResult:
    """Repeated stratified k-fold balanced accuracy; ``values`` holds the r repeat means."""
    start = time.perf_counter()
    labels = list(labels)
    if matrix.n_rows != len(labels):
        raise ValueError("matrix rows and labels differ in number")
    classes = list(dict.fromkeys(labels))
    plans = repeated_stratified_kfold(labels, k, r, seed)
    fold_values = []
    for plan in plans:
        per_fold = []
        for f in range(k):
            params, model = fit_on_rows(matrix, labels, plan.train_rows(f), cfg, classes)
            per_fold.append(_score_rows(matrix, labels, params, model, plan.test_rows(f),
                                        "balanced_accuracy"))
        fold_values.append(per_fold)
    counts = {c: labels.count(c) for c in classes}
    return EvalResult(
        problem=name,
        feature_set=feature_set,
        metric="balanced_accuracy",
        values=[float(np.mean(v)) for v in fold_values],
        seed=seed,
        protocol="cv",
        k=k,
        r=r,
        fold_values=fold_values,
        fold_plan_hash=fold_plan_hash(plans),
        class_counts=counts,
        config=_cfg_dict(cfg),
        timing_s=time.perf_counter() - start,
    )


def _permuted_labels(labels: list[str], seed: int, j: int) -> list[str]:
    rng = np.random.default_rng([seed, _PERM_STREAM, j])
    identity = np.arange(len(labels))
    while True:
        perm = rng.permutation(len(labels))
        if len(labels) < 2 or not np.array_equal(perm, identity):
            break
    return [labels[i] for i in perm]


def _null_chunk(args) -> list[float]:
    matrix, labels, cfg, k, r, seed, js = args
    out = []
    for j in js:
        res = run_cv_eval(matrix, _permuted_labels(labels, seed, j), cfg, k, r, seed)
        out.append(res.mean)
    return out


def permutation_null(
    matrix: FeatureMatrix | Mapping[str, FeatureMatrix],
    labels: Sequence[str],
    cfg: TrainConfig = TrainConfig(balanced_weights=True),
    k: int = 10,
    r: int = 10,
    n_perm: int = 1000,
    seed: int = 0,
    pool: Sequence[str] | None = None,
    jobs: int = 1,
) -> np.ndarray:
    """Grand-mean CV balanced accuracy under ``n_perm`` label shuffles.

    ``matrix`` may map model ids to matrices; the null samples of every model
    named in ``pool`` (default: all) are concatenated in pool order. Every
    model sees the same sequence of permutations. The identity permutation is
    never used.
    """
    if n_perm < 1:
        raise ValueError("n_perm must be >= 1")
    models = {"model": matrix} if isinstance(matrix, FeatureMatrix) else dict(matrix)
    pool = list(models) if pool is None else list(pool)
    labels = list(labels)
    chunks_per_model = max(1, jobs)
    work = []
    for model_id in pool:
        js = np.arange(n_perm)
        for part in np.array_split(js, chunks_per_model):
            if part.size:
                work.append((models[model_id], labels, cfg, k, r, seed, part.tolist()))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_null_chunk, work))
    else:
        results = [_null_chunk(w) for w in work]
    return np.array([v for chunk in results for v in chunk])


def permutation_pvalue(observed: float, nulls: Sequence[float]) -> float:
    """(1 + #{null >= observed}) / (1 + #nulls)."""
    nulls = np.asarray(nulls, dtype=np.float64)
    if nulls.size == 0:
        raise ValueError("nulls must be non-empty")
    return float((1 + np.count_nonzero(nulls >= observed)) / (1 + nulls.size))
