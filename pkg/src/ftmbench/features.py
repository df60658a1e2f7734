"""Feature extraction, feature matrices and the train-fitted z-score scaler.

Two built-in feature sets are provided:

* ``FTM``: the per-series mean and sample standard deviation.
* ``DYN10``: ten dynamics features computed on the individually z-scored
  series, so none of them depends on the series' location or scale.

``FTM_DYN10`` concatenates them. Features computed elsewhere (for example
the canonical catch22 set) can be read from CSV with :func:`read_feature_csv`.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .tsio import MIN_REAL_VALUES, LabeledInstance, RawSeries

__all__ = [
    "FTM_NAMES",
    "DYN10_NAMES",
    "FeatureSet",
    "FTM",
    "DYN10",
    "FTM_DYN10",
    "parse_feature_set",
    "FeatureMatrix",
    "ScalerParams",
    "UndefinedFeatureError",
    "DegenerateSeriesError",
    "ftm",
    "znorm_series",
    "autocorrelation",
    "dft_power",
    "dyn10",
    "extract_matrix",
    "assemble_multichannel",
    "fit_scaler",
    "apply_scaler",
    "read_feature_csv",
    "write_feature_csv",
]

FTM_NAMES = ("mean", "stddev")
# columns whose spread is below this (relative to max(1, |center|)) are constant
SCALE_FLOOR = 1e-12

DYN10_NAMES = (
    "acf1",
    "acf_first_zero",
    "acf_first_1e",
    "skewness",
    "excess_kurtosis",
    "outlier2_prop",
    "lowfreq_frac",
    "above_mean_run",
    "trev",
    "crossing_rate",
)


class UndefinedFeatureError(ValueError):
    """A feature cannot be computed at all (e.g. a series with no real values)."""


class DegenerateSeriesError(ValueError):
    """The series has (near) zero spread and cannot be z-scored."""


@dataclass(frozen=True)
class FeatureSet:
    """Identifier of a feature set: ``ftm``, ``dyn10``, ``ftm+dyn10`` or ``external:<path>``."""

    kind: str
    source: str | None = None

    @property
    def name(self) -> str:
        if self.kind == "external":
            return f"external-{Path(self.source).stem}"
        return self.kind

    @property
    def uses_dyn10(self) -> bool:
        return self.kind in ("dyn10", "ftm+dyn10")

    @property
    def columns(self) -> tuple[str, ...]:
        if self.kind == "ftm":
            return FTM_NAMES
        if self.kind == "dyn10":
            return DYN10_NAMES
        if self.kind == "ftm+dyn10":
            return FTM_NAMES + DYN10_NAMES
        raise ValueError("external feature sets take their columns from the CSV header")

    def __str__(self):
        return self.kind if self.source is None else f"{self.kind}:{self.source}"


FTM = FeatureSet("ftm")
DYN10 = FeatureSet("dyn10")
FTM_DYN10 = FeatureSet("ftm+dyn10")


def parse_feature_set(text: str) -> FeatureSet:
    low = text.strip().lower()
    if low in ("ftm", "dyn10", "ftm+dyn10"):
        return FeatureSet(low)
    if low.startswith("external:"):
        source = text.strip()[len("external:"):]
        if not source:
            raise ValueError("external feature set needs a CSV path")
        return FeatureSet("external", source)
    raise ValueError(f"unknown feature set {text!r}")


@dataclass
class FeatureMatrix:
    values: np.ndarray
    columns: list[str]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.columns):
            raise ValueError(
                f"matrix shape {self.values.shape} does not match {len(self.columns)} columns"
            )
        if self.labels and len(self.labels) != self.values.shape[0]:
            raise ValueError("one label per row required")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def take(self, rows: Sequence[int] | np.ndarray) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.intp)
        labels = [self.labels[i] for i in rows] if self.labels else []
        return FeatureMatrix(self.values[rows], list(self.columns), labels)


@dataclass(frozen=True)
class ScalerParams:
    center: np.ndarray
    scale: np.ndarray
    columns: tuple[str, ...]
    # columns judged constant on the training rows; always scaled to 0
    constant: np.ndarray | None = None


def _real(series: RawSeries | np.ndarray) -> np.ndarray:
    if isinstance(series, RawSeries):
        return series.real_values()
    arr = np.asarray(series, dtype=np.float64)
    return arr[~np.isnan(arr)]


def ftm(series: RawSeries | np.ndarray) -> tuple[float, float]:
    """Mean and sample standard deviation (divisor n-1) of the real values."""
    x = _real(series)
    n = x.size
    if n == 0:
        raise UndefinedFeatureError("series has no real values")
    if np.all(x == x[0]):
        return float(x[0]), 0.0
    return float(np.mean(x)), float(np.std(x, ddof=1))


def znorm_series(series: RawSeries | np.ndarray) -> np.ndarray:
    """Z-score with population moments (divisor n); missing values are dropped."""
    x = _real(series)
    if x.size < 2:
        raise DegenerateSeriesError("need at least two real values")
    mu = np.mean(x)
    centered = x - mu
    sd = math.sqrt(float(np.mean(centered * centered)))
    # relative floor: a spread at rounding level is no spread at all
    if sd <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        raise DegenerateSeriesError("constant series")
    return centered / sd


def autocorrelation(z: np.ndarray) -> np.ndarray:
    """Biased autocorrelation r_k = (1/n) sum_t z_t z_{t+k} for k = 0..n-1."""
    n = z.size
    return np.correlate(z, z, mode="full")[n - 1:] / n


def _dft_power_direct(z: np.ndarray, bins: np.ndarray) -> np.ndarray:
    n = z.size
    t = np.arange(n)
    out = np.empty(bins.size)
    # row chunks keep the n x n phase table bounded in memory
    step = max(1, 4_000_000 // max(n, 1))
    for start in range(0, bins.size, step):
        k = bins[start:start + step]
        # exact integer phase index keeps large k*t products accurate
        phase = 2.0 * np.pi * ((k[:, None] * t[None, :]) % n) / n
        re = np.cos(phase) @ z
        im = np.sin(phase) @ z
        out[start:start + step] = re * re + im * im
    return out


def dft_power(z: np.ndarray, bins: np.ndarray | None = None, fast: bool = False) -> np.ndarray:
    """Periodogram |DFT_k(z)|^2 for the requested bins (default all n bins).

    The direct O(n^2) sum is the reference; ``fast=True`` uses numpy's FFT.
    """
    z = np.asarray(z, dtype=np.float64)
    n = z.size
    bins = np.arange(n) if bins is None else np.asarray(bins, dtype=np.int64)
    if fast:
        spec = np.fft.fft(z)
        return np.abs(spec[bins]) ** 2
    return _dft_power_direct(z, bins)


def _longest_run(mask: np.ndarray) -> int:
    best = run = 0
    for flag in mask:
        run = run + 1 if flag else 0
        if run > best:
            best = run
    return best


def dyn10(series: RawSeries | np.ndarray, fast_dft: bool = False) -> np.ndarray:
    """Ten location/scale-invariant dynamics features (NaN x 10 when undefined).

    Missing entries are dropped and the remaining values treated as
    contiguous. Series with fewer than ten real values, or constant ones,
    give all-NaN output.
    """
    x = _real(series)
    out = np.full(len(DYN10_NAMES), np.nan)
    n = x.size
    if n < MIN_REAL_VALUES:
        return out
    try:
        z = znorm_series(x)
    except DegenerateSeriesError:
        return out

    acf = autocorrelation(z)
    lags = acf[1:]
    nonpos = np.flatnonzero(lags <= 0)
    first_zero = nonpos[0] + 1 if nonpos.size else n - 1
    below = np.flatnonzero(lags < 1.0 / math.e)
    first_1e = below[0] + 1 if below.size else n - 1

    z2 = z * z
    half = n // 2
    m = max(1, math.ceil(0.2 * half))
    power = dft_power(z, np.arange(1, half + 1), fast=fast_dft)
    total = float(np.sum(power))
    lowfreq = float(np.sum(power[:m]) / total) if total > 0 else np.nan

    dz = np.diff(z)
    positive = z >= 0

    out[0] = lags[0]
    out[1] = first_zero / n
    out[2] = first_1e / n
    out[3] = np.mean(z2 * z)
    out[4] = np.mean(z2 * z2) - 3.0
    out[5] = np.count_nonzero(np.abs(z) > 2.0) / n
    out[6] = lowfreq
    out[7] = _longest_run(z > 0) / n
    out[8] = np.sum(dz * dz * dz) / (n - 1)
    out[9] = np.count_nonzero(positive[1:] != positive[:-1]) / (n - 1)
    return out


def _instance_features(series: RawSeries, fs: FeatureSet, fast_dft: bool) -> np.ndarray:
    parts = []
    if fs.kind in ("ftm", "ftm+dyn10"):
        parts.append(np.array(ftm(series)))
    if fs.kind in ("dyn10", "ftm+dyn10"):
        parts.append(dyn10(series, fast_dft=fast_dft))
    return np.concatenate(parts)


def extract_matrix(
    instances: Sequence[LabeledInstance],
    fs: FeatureSet,
    fast_dft: bool = False,
) -> FeatureMatrix:
    """Compute one feature row per instance, in instance order."""
    if fs.kind == "external":
        raise ValueError("external feature sets are read with read_feature_csv")
    cols = list(fs.columns)
    values = np.empty((len(instances), len(cols)))
    for i, inst in enumerate(instances):
        if inst.series.real_count == 0:
            raise UndefinedFeatureError(f"instance {i}: series has no real values")
        values[i] = _instance_features(inst.series, fs, fast_dft)
    return FeatureMatrix(values, cols, [inst.label for inst in instances])


def assemble_multichannel(
    per_channel: Sequence[FeatureMatrix], channel_names: Sequence[str]
) -> FeatureMatrix:
    """Flatten an instances x channels x features stack to channel-major columns."""
    if len(per_channel) != len(channel_names) or not per_channel:
        raise ValueError("need one name per channel matrix and at least one channel")
    first = per_channel[0]
    for name, m in zip(channel_names, per_channel):
        if m.n_rows != first.n_rows:
            raise ValueError(f"channel {name!r}: row count {m.n_rows} != {first.n_rows}")
        if list(m.labels) != list(first.labels):
            raise ValueError(f"channel {name!r}: labels differ from first channel")
    columns = [f"{ch}.{col}" for ch, m in zip(channel_names, per_channel) for col in m.columns]
    values = np.hstack([m.values for m in per_channel])
    return FeatureMatrix(values, columns, list(first.labels))


def fit_scaler(train: FeatureMatrix) -> ScalerParams:
    """Per-column mean and population standard deviation, ignoring NaN cells.

    Constant (or all-NaN) columns get scale 1 and therefore map to 0.
    """
    v = train.values
    mask = ~np.isnan(v)
    counts = mask.sum(axis=0)
    filled = np.where(mask, v, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        center = filled.sum(axis=0) / counts
        dev = np.where(mask, v - center, 0.0)
        scale = np.sqrt((dev * dev).sum(axis=0) / counts)
    empty = counts == 0
    center[empty] = 0.0
    # spread at floating-point residue level counts as constant; otherwise
    # rounding noise in e.g. the mean of z-scored series gets amplified
    flat = ~(scale > SCALE_FLOOR * np.maximum(1.0, np.abs(center)))
    constant = empty | flat
    scale[constant] = 1.0
    return ScalerParams(center, scale, tuple(train.columns), constant)


def apply_scaler(params: ScalerParams, m: FeatureMatrix) -> FeatureMatrix:
    if tuple(m.columns) != params.columns:
        raise ValueError("column names differ from those the scaler was fit on")
    out = (m.values - params.center) / params.scale
    out[np.isnan(out)] = 0.0
    if params.constant is not None:
        out[:, params.constant] = 0.0
    return FeatureMatrix(out, list(m.columns), list(m.labels))


def read_feature_csv(path: str | os.PathLike, labels: Sequence[str] | None = None) -> FeatureMatrix:
    """Read an ``instance_index,<features...>`` table; rows are ordered by index."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "instance_index":
            raise ValueError(f"{path}: first column must be 'instance_index'")
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields")
            idx = int(row[0])
            if idx in rows:
                raise ValueError(f"{path}:{lineno}: duplicate instance_index {idx}")
            rows[idx] = [float(tok) for tok in row[1:]]
    if sorted(rows) != list(range(len(rows))):
        raise ValueError(f"{path}: instance_index must cover 0..n-1")
    values = np.array([rows[i] for i in range(len(rows))], dtype=np.float64)
    values = values.reshape(len(rows), len(header) - 1)
    if labels is not None and len(labels) != len(rows):
        raise ValueError(f"{path}: {len(rows)} rows but {len(labels)} labels")
    return FeatureMatrix(values, header[1:], list(labels) if labels is not None else [])


def _fmt(v: float) -> str:
    return "NaN" if math.isnan(v) else f"{v:.17g}"


def write_feature_csv(m: FeatureMatrix, path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance_index", *m.columns])
        for i, row in enumerate(m.values):
            w.writerow([i, *(_fmt(v) for v in row)])
