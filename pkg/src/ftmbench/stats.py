"""Corrected resampled t-tests, the one-sample test against chance, and Bonferroni."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

__all__ = [
    "ComparisonResult",
    "student_t_sf",
    "corrected_t",
    "corrected_t_resample",
    "corrected_t_kfold",
    "t_test_vs_chance",
    "bonferroni",
]


@dataclass(frozen=True)
class ComparisonResult:
    mean_diff: float
    t_statistic: float
    degrees_of_freedom: int
    p_value: float
    correction_ratio: float
    n_samples: int
    mode: str = "resample"

    def to_dict(self) -> dict:
        return asdict(self)


def student_t_sf(t: float, df: float) -> float:
    """Upper-tail probability P(T > t) of Student's t with ``df`` degrees of freedom.

    Uses the regularized incomplete beta identity
    P(T > |t|) = 0.5 * I_{df / (df + t^2)}(df / 2, 1 / 2).
    """
    if not df >= 1:
        raise ValueError("df must be >= 1")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5 * float(betainc(0.5 * df, 0.5, df / (df + t * t)))
    return tail if t >= 0 else 1.0 - tail


def _mean_var(values: np.ndarray) -> tuple[float, float]:
    # identical values: exact mean, exactly zero variance
    if np.all(values == values[0]):
        return float(values[0]), 0.0
    return float(np.mean(values)), float(np.var(values, ddof=1))


def corrected_t(diffs: Sequence[float], ratio: float, mode: str = "resample") -> ComparisonResult:
    """Paired t with the variance inflated by ``(1/n + ratio)``; two-sided p.

    ``ratio`` is n_test / n_train; zero gives the ordinary one-sample t.
    """
    d = np.asarray(diffs, dtype=np.float64)
    n = d.size
    if n < 2:
        raise ValueError("need at least two differences")
    if ratio < 0:
        raise ValueError("correction ratio must be non-negative")
    mean, var = _mean_var(d)
    if var == 0.0:
        if mean == 0.0:
            t, p = 0.0, 1.0
        else:
            t, p = math.copysign(math.inf, mean), 0.0
    else:
        t = mean / math.sqrt((1.0 / n + ratio) * var)
        p = min(1.0, 2.0 * student_t_sf(abs(t), n - 1))
    return ComparisonResult(mean, t, n - 1, p, ratio, n, mode)


def corrected_t_resample(diffs: Sequence[float], n_train: int, n_test: int) -> ComparisonResult:
    """Corrected resampled t for repeated train/test splits of fixed sizes."""
    if n_train < 1 or n_test < 1:
        raise ValueError("n_train and n_test must be >= 1")
    return corrected_t(diffs, n_test / n_train, "resample")


def corrected_t_kfold(diffs: Sequence[float], k: int, r: int | None = None) -> ComparisonResult:
    """Corrected t for repeated k-fold CV; the test/train ratio is 1 / (k - 1).

    ``diffs`` holds either k*r per-fold differences (mode ``fold``) or r
    per-repeat means (mode ``repeat``); with ``r`` omitted, per-fold is assumed.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    n = len(diffs)
    if r is None or n == k * r:
        mode = "fold"
    elif n == r:
        mode = "repeat"
    else:
        raise ValueError(f"expected {k * r} per-fold or {r} per-repeat differences, got {n}")
    return corrected_t(diffs, 1.0 / (k - 1), mode)


def t_test_vs_chance(accuracies: Sequence[float], chance: float, sided: str = "greater") -> float:
    """One-sample t-test p-value of the accuracies against a fixed chance level."""
    a = np.asarray(accuracies, dtype=np.float64)
    n = a.size
    if n < 2:
        raise ValueError("need at least two accuracy values")
    if sided not in ("greater", "two"):
        raise ValueError("sided must be 'greater' or 'two'")
    mean, var = _mean_var(a)
    diff = mean - chance
    if var == 0.0:
        if diff == 0.0:
            t = 0.0
        else:
            t = math.copysign(math.inf, diff)
    else:
        t = diff / math.sqrt(var / n)
    if sided == "greater":
        return student_t_sf(t, n - 1)
    if t == 0.0:
        return 1.0
    return min(1.0, 2.0 * student_t_sf(abs(t), n - 1))


def bonferroni(p_values: Sequence[float]) -> list[float]:
    ps = [float(p) for p in p_values]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p} outside [0, 1]")
    m = len(ps)
    return [min(1.0, m * p) for p in ps]
