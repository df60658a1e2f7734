"""Reading, writing and validating UEA/UCR ``.ts`` problem files.

Only univariate files are supported. Missing values are spelled ``?``;
every other value token must parse as a decimal real.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "MIN_REAL_VALUES",
    "RawSeries",
    "LabeledInstance",
    "Problem",
    "TsMetadata",
    "ValidationReport",
    "TsParseError",
    "MissingDataSectionError",
    "HeaderError",
    "MissingSeparatorError",
    "UnknownClassError",
    "BadValueError",
    "EmptySeriesError",
    "MultivariateError",
    "ProblemLoadError",
    "parse_ts_text",
    "read_ts",
    "load_problem",
    "format_ts",
    "write_problem",
    "validate",
]

# Series with fewer real values than this cannot yield dynamics features.
MIN_REAL_VALUES = 10

_BOOL_KEYS = {"timestamps", "missing", "univariate", "equallength"}


class TsParseError(ValueError):
    """Base class for ``.ts`` grammar violations; carries the 1-based line number."""

    reason = "parse error"

    def __init__(self, line: int | None, detail: str = ""):
        self.line = line
        self.detail = detail
        where = f"line {line}: " if line is not None else ""
        msg = f"{where}{self.reason}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MissingDataSectionError(TsParseError):
    reason = "missing '@data' section"


class HeaderError(TsParseError):
    reason = "malformed header"


class MissingSeparatorError(TsParseError):
    reason = "missing ':' separator"


class UnknownClassError(TsParseError):
    reason = "class token not in declared class set"


class BadValueError(TsParseError):
    reason = "non-numeric value token"


class EmptySeriesError(TsParseError):
    reason = "empty series"


class MultivariateError(TsParseError):
    reason = "multivariate data line (more than one ':')"


class ProblemLoadError(Exception):
    """Raised when a problem directory cannot be turned into a :class:`Problem`."""


@dataclass(frozen=True)
class RawSeries:
    """Ordered real values; missing entries are stored as NaN."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a series needs at least one entry")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def length(self) -> int:
        return int(self.values.size)

    @property
    def real_count(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.values)))

    def real_values(self) -> np.ndarray:
        return self.values[~np.isnan(self.values)]

    def __eq__(self, other):
        if not isinstance(other, RawSeries):
            return NotImplemented
        return np.array_equal(self.values, other.values, equal_nan=True)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class LabeledInstance:
    series: RawSeries
    label: str | None


@dataclass
class TsMetadata:
    problem_name: str | None = None
    timestamps: bool | None = None
    missing: bool | None = None
    univariate: bool | None = None
    equal_length: bool | None = None
    series_length: int | None = None
    class_label: bool = False
    classes: list[str] = field(default_factory=list)
    extra: dict[str, str] = field(default_factory=dict)


@dataclass
class Problem:
    name: str
    train: list[LabeledInstance]
    test: list[LabeledInstance]
    classes: list[str]
    equal_length: bool
    series_length: int | None = None

    def __post_init__(self):
        if not self.train or not self.test:
            raise ValueError(f"{self.name}: train and test must be non-empty")
        present = {inst.label for inst in self.train + self.test}
        if present != set(self.classes) or len(set(self.classes)) != len(self.classes):
            raise ValueError(f"{self.name}: classes must be exactly the labels present")
        if self.equal_length:
            lengths = {inst.series.length for inst in self.train + self.test}
            if len(lengths) != 1 or (
                self.series_length is not None and lengths != {self.series_length}
            ):
                raise ValueError(f"{self.name}: equal_length set but lengths differ")
            if self.series_length is None:
                self.series_length = lengths.pop()

    @property
    def instances(self) -> list[LabeledInstance]:
        """Pooled instances, designated train first then designated test."""
        return self.train + self.test

    @property
    def labels(self) -> list[str]:
        return [inst.label for inst in self.instances]

    def class_counts(self, split: str = "all") -> dict[str, int]:
        source = {"train": self.train, "test": self.test, "all": self.instances}[split]
        counts = Counter(inst.label for inst in source)
        return {c: counts.get(c, 0) for c in self.classes}


@dataclass
class ValidationReport:
    train_class_counts: dict[str, int]
    test_class_counts: dict[str, int]
    min_length: int
    max_length: int
    mean_length: float
    train_missing: int
    test_missing: int
    # indices into Problem.instances (train first)
    short_instances: list[int]

    @property
    def ok(self) -> bool:
        return not self.short_instances

    def to_dict(self) -> dict:
        return {
            "train_class_counts": self.train_class_counts,
            "test_class_counts": self.test_class_counts,
            "min_length": self.min_length,
            "max_length": self.max_length,
            "mean_length": self.mean_length,
            "train_missing": self.train_missing,
            "test_missing": self.test_missing,
            "short_instances": self.short_instances,
        }


def _parse_bool(token: str, lineno: int) -> bool:
    low = token.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise HeaderError(lineno, f"expected true/false, got {token!r}")


def _parse_value(token: str, lineno: int) -> float:
    tok = token.strip()
    if tok == "?":
        return math.nan
    if not tok:
        raise BadValueError(lineno, "blank field")
    try:
        value = float(tok)
    except ValueError:
        raise BadValueError(lineno, repr(tok)) from None
    if math.isnan(value):
        # 'nan' spelled out is not the missing marker
        raise BadValueError(lineno, repr(tok))
    return value


def _parse_header_line(line: str, lineno: int, meta: TsMetadata) -> None:
    parts = line[1:].split()
    if not parts:
        raise HeaderError(lineno, "empty '@' line")
    key, args = parts[0], parts[1:]
    low = key.lower()
    if low == "problemname":
        if len(args) != 1:
            raise HeaderError(lineno, "@problemName takes one token")
        meta.problem_name = args[0]
    elif low in _BOOL_KEYS:
        if len(args) != 1:
            raise HeaderError(lineno, f"@{key} takes one token")
        value = _parse_bool(args[0], lineno)
        attr = {"timestamps": "timestamps", "missing": "missing",
                "univariate": "univariate", "equallength": "equal_length"}[low]
        setattr(meta, attr, value)
    elif low == "serieslength":
        try:
            meta.series_length = int(args[0])
        except (IndexError, ValueError):
            raise HeaderError(lineno, "@seriesLength needs an integer") from None
    elif low == "classlabel":
        if not args:
            raise HeaderError(lineno, "@classLabel needs true/false")
        meta.class_label = _parse_bool(args[0], lineno)
        if meta.class_label:
            if len(args) < 2:
                raise HeaderError(lineno, "@classLabel true without class tokens")
            meta.classes = list(dict.fromkeys(args[1:]))
        elif len(args) > 1:
            raise HeaderError(lineno, "@classLabel false takes no class tokens")
    else:
        meta.extra[key] = " ".join(args)


def parse_ts_text(text: str) -> tuple[TsMetadata, list[LabeledInstance]]:
    """Parse the contents of a univariate ``.ts`` file.

    Returns the header metadata and the instances in file order. Any
    grammar violation raises a :class:`TsParseError` subclass whose
    ``line`` attribute is the 1-based line number.
    """
    meta = TsMetadata()
    instances: list[LabeledInstance] = []
    in_data = False
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_data:
            if not line.startswith("@"):
                raise MissingDataSectionError(lineno, "data line before '@data'")
            if line.lower() == "@data":
                in_data = True
                declared = set(meta.classes)
                if meta.timestamps:
                    raise HeaderError(lineno, "timestamped series are not supported")
                if meta.univariate is False:
                    raise HeaderError(lineno, "multivariate problems are not supported")
                continue
            _parse_header_line(line, lineno, meta)
            continue

        if line.startswith("@"):
            raise HeaderError(lineno, "header line after '@data'")
        n_colons = line.count(":")
        label: str | None = None
        if meta.class_label:
            if n_colons == 0:
                raise MissingSeparatorError(lineno)
            if n_colons > 1:
                raise MultivariateError(lineno)
            body, label = line.rsplit(":", 1)
            label = label.strip()
            if label not in declared:
                raise UnknownClassError(lineno, repr(label))
        else:
            if n_colons:
                raise MultivariateError(lineno)
            body = line
        if not body.strip():
            raise EmptySeriesError(lineno)
        values = [_parse_value(tok, lineno) for tok in body.split(",")]
        instances.append(LabeledInstance(RawSeries(np.array(values)), label))

    if not in_data:
        raise MissingDataSectionError(None)
    return meta, instances


def read_ts(path: str | os.PathLike) -> tuple[TsMetadata, list[LabeledInstance]]:
    return parse_ts_text(Path(path).read_text(encoding="utf-8"))


def load_problem(directory: str | os.PathLike, name: str) -> Problem:
    """Load ``<directory>/<name>/<name>_TRAIN.ts`` and ``_TEST.ts`` as one problem."""
    base = Path(directory) / name
    paths = {split: base / f"{name}_{split}.ts" for split in ("TRAIN", "TEST")}
    for path in paths.values():
        if not path.is_file():
            raise ProblemLoadError(f"{name}: missing file {path}")
    try:
        meta_tr, train = read_ts(paths["TRAIN"])
        meta_te, test = read_ts(paths["TEST"])
    except TsParseError as exc:
        raise ProblemLoadError(f"{name}: {exc}") from exc
    if not (meta_tr.class_label and meta_te.class_label):
        raise ProblemLoadError(f"{name}: both files must declare @classLabel true")
    if set(meta_tr.classes) != set(meta_te.classes):
        raise ProblemLoadError(
            f"{name}: class set mismatch between TRAIN {sorted(meta_tr.classes)} "
            f"and TEST {sorted(meta_te.classes)}"
        )
    if not train or not test:
        raise ProblemLoadError(f"{name}: empty TRAIN or TEST split")

    present = {inst.label for inst in train + test}
    classes = [c for c in meta_tr.classes if c in present]

    lengths = {inst.series.length for inst in train + test}
    declared = [m.equal_length for m in (meta_tr, meta_te) if m.equal_length is not None]
    if declared:
        equal_length = all(declared) and len(lengths) == 1
    else:
        equal_length = len(lengths) == 1
    series_length = next(iter(lengths)) if equal_length else None
    return Problem(name, train, test, classes, equal_length, series_length)


def _format_value(v: float) -> str:
    return "?" if math.isnan(v) else repr(float(v))


def format_ts(
    instances: list[LabeledInstance],
    classes: list[str],
    name: str,
    equal_length: bool | None = None,
) -> str:
    """Serialize instances to ``.ts`` text that :func:`parse_ts_text` reads back exactly."""
    lengths = {inst.series.length for inst in instances}
    if equal_length is None:
        equal_length = len(lengths) == 1
    has_missing = any(inst.series.real_count < inst.series.length for inst in instances)
    lines = [
        f"@problemName {name}",
        "@timeStamps false",
        f"@missing {str(has_missing).lower()}",
        "@univariate true",
        f"@equalLength {str(equal_length).lower()}",
    ]
    if equal_length and lengths:
        lines.append(f"@seriesLength {next(iter(lengths))}")
    lines.append("@classLabel true " + " ".join(classes))
    lines.append("@data")
    for inst in instances:
        body = ",".join(_format_value(v) for v in inst.series.values)
        lines.append(f"{body}:{inst.label}")
    return "\n".join(lines) + "\n"


def write_problem(problem: Problem, root: str | os.PathLike) -> Path:
    """Write ``problem`` in the archive layout under ``root``; returns the problem directory."""
    base = Path(root) / problem.name
    base.mkdir(parents=True, exist_ok=True)
    for split, insts in (("TRAIN", problem.train), ("TEST", problem.test)):
        text = format_ts(insts, problem.classes, problem.name, problem.equal_length)
        (base / f"{problem.name}_{split}.ts").write_text(text, encoding="utf-8")
    return base


def validate(problem: Problem) -> ValidationReport:
    lengths = np.array([inst.series.length for inst in problem.instances])
    missing = [inst.series.length - inst.series.real_count for inst in problem.instances]
    n_train = len(problem.train)
    short = [
        i for i, inst in enumerate(problem.instances)
        if inst.series.real_count < MIN_REAL_VALUES
    ]
    return ValidationReport(
        train_class_counts=problem.class_counts("train"),
        test_class_counts=problem.class_counts("test"),
        min_length=int(lengths.min()),
        max_length=int(lengths.max()),
        mean_length=float(lengths.mean()),
        train_missing=int(sum(missing[:n_train])),
        test_missing=int(sum(missing[n_train:])),
        short_instances=short,
    )
