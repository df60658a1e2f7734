"""Deterministic synthetic problems with known ground truth.

Uniforms come from the counter-based Philox4x64 generator keyed by the
spec's seed and a per-generator tag; each raw 64-bit word ``r`` becomes
``u = ((r >> 11) + 0.5) * 2**-53`` in the open interval (0, 1). Standard
normals are produced from consecutive uniform pairs by the Box-Muller
transform ``sqrt(-2 ln u1) * (cos(2 pi u2), sin(2 pi u2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .features import FeatureMatrix
from .tsio import LabeledInstance, Problem, RawSeries

__all__ = [
    "SynthSpec",
    "GaussianStream",
    "gen_mean_shift",
    "gen_scale_shift",
    "gen_ar1_contrast",
    "gen_null",
]

_TAGS = {"mean_shift": 1, "scale_shift": 2, "ar1_contrast": 3, "null": 4}
AR1_BURN_IN = 100


@dataclass(frozen=True)
class SynthSpec:
    generator: str
    n_per_class: int = 50
    length: int = 100
    params: dict = field(default_factory=dict)
    seed: int = 0
    z_score_each_series: bool = False

    def __post_init__(self):
        if self.generator not in _TAGS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.n_per_class < 2:
            raise ValueError("n_per_class must be >= 2")
        if self.length < 10:
            raise ValueError("length must be >= 10")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


class GaussianStream:
    """Sequential standard normals from a keyed Philox counter stream."""

    def __init__(self, seed: int, tag: int):
        key = (seed & ((1 << 64) - 1)) | (tag << 64)
        self._bitgen = np.random.Philox(key=key)
        self._spare: list[float] = []

    def uniforms(self, n: int) -> np.ndarray:
        raw = self._bitgen.random_raw(n).astype(np.uint64)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0 ** -53)

    def normals(self, n: int) -> np.ndarray:
        out = np.empty(n)
        filled = 0
        while self._spare and filled < n:
            out[filled] = self._spare.pop()
            filled += 1
        need = n - filled
        if need:
            pairs = (need + 1) // 2
            u = self.uniforms(2 * pairs)
            vals = []
            for u1, u2 in zip(u[0::2], u[1::2]):
                radius = math.sqrt(-2.0 * math.log(u1))
                angle = 2.0 * math.pi * u2
                vals.append(radius * math.cos(angle))
                vals.append(radius * math.sin(angle))
            out[filled:] = vals[:need]
            if len(vals) > need:
                self._spare.append(vals[-1])
        return out


def _znorm(x: np.ndarray) -> np.ndarray:
    centered = x - x.mean()
    return centered / math.sqrt(float(np.mean(centered * centered)))


def _split(spec: SynthSpec, series_by_class: dict[str, list[np.ndarray]]) -> Problem:
    n_train = spec.n_per_class // 2
    train, test = [], []
    for label, series in series_by_class.items():
        for j, x in enumerate(series):
            if spec.z_score_each_series:
                x = _znorm(x)
            inst = LabeledInstance(RawSeries(x), label)
            (train if j < n_train else test).append(inst)
    return Problem(spec.generator, train, test, list(series_by_class),
                   equal_length=True, series_length=spec.length)


def gen_mean_shift(spec: SynthSpec) -> Problem:
    """Class A ~ iid N(0, 1); class B ~ iid N(delta, 1)."""
    delta = float(spec.params.get("delta", 0.0))
    if not math.isfinite(delta):
        raise ValueError("delta must be finite")
    g = GaussianStream(spec.seed, _TAGS["mean_shift"])
    data = {
        "A": [g.normals(spec.length) for _ in range(spec.n_per_class)],
        "B": [g.normals(spec.length) + delta for _ in range(spec.n_per_class)],
    }
    return _split(spec, data)


def gen_scale_shift(spec: SynthSpec) -> Problem:
    """Class A ~ iid N(0, 1); class B ~ iid N(0, ratio^2)."""
    ratio = float(spec.params.get("ratio", 1.0))
    if not ratio > 0:
        raise ValueError("ratio must be positive")
    g = GaussianStream(spec.seed, _TAGS["scale_shift"])
    data = {
        "A": [g.normals(spec.length) for _ in range(spec.n_per_class)],
        "B": [g.normals(spec.length) * ratio for _ in range(spec.n_per_class)],
    }
    return _split(spec, data)


def _ar1(g: GaussianStream, phi: float, length: int) -> np.ndarray:
    eps = g.normals(AR1_BURN_IN + length)
    x = np.empty_like(eps)
    prev = 0.0
    for t, e in enumerate(eps):
        prev = phi * prev + e
        x[t] = prev
    return x[AR1_BURN_IN:]


def gen_ar1_contrast(spec: SynthSpec) -> Problem:
    """AR(1) with coefficient phi_a (class A) or phi_b (class B); always z-scored per series."""
    phi_a = float(spec.params.get("phi_a", 0.8))
    phi_b = float(spec.params.get("phi_b", -0.8))
    g = GaussianStream(spec.seed, _TAGS["ar1_contrast"])
    data = {
        "A": [_ar1(g, phi_a, spec.length) for _ in range(spec.n_per_class)],
        "B": [_ar1(g, phi_b, spec.length) for _ in range(spec.n_per_class)],
    }
    forced = SynthSpec(spec.generator, spec.n_per_class, spec.length, spec.params,
                       spec.seed, z_score_each_series=True)
    return _split(forced, data)


def gen_null(spec: SynthSpec) -> tuple[FeatureMatrix, list[str]]:
    """``2 * n_per_class`` rows of ``length`` iid N(0, 1) features with shuffled balanced labels."""
    g = GaussianStream(spec.seed, _TAGS["null"])
    n = 2 * spec.n_per_class
    values = g.normals(n * spec.length).reshape(n, spec.length)
    u = g.uniforms(n)
    labels = ["A"] * spec.n_per_class + ["B"] * spec.n_per_class
    # argsort of uniforms gives a random permutation; stable sort breaks ties
    order = np.argsort(u, kind="stable")
    labels = [labels[i] for i in order]
    columns = [f"x{j}" for j in range(spec.length)]
    return FeatureMatrix(values, columns, labels), labels
