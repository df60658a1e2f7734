"""``ftmbench`` command line.

Subcommands hand results to each other through flat files: ``bench`` writes
per-(problem, feature set) result CSVs with JSON sidecars, which ``chance``,
``compare`` and ``plot`` read back.

Exit codes: 0 success (excluded problems allowed), 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .evaluation import (
    EvalResult,
    ProblemExcluded,
    _chance_from_counts,
    permutation_null,
    permutation_pvalue,
    problem_features,
    repeated_stratified_kfold,
    fold_plan_hash,
    run_cv_eval,
    run_resample_eval,
)
from .features import (
    FeatureSet,
    assemble_multichannel,
    extract_matrix,
    parse_feature_set,
    read_feature_csv,
    write_feature_csv,
)
from .stats import bonferroni, corrected_t_kfold, corrected_t_resample, t_test_vs_chance
from .svg import histogram_svg, ladder_svg, paired_svg, scatter_svg
from .svm import TrainConfig
from .synth import SynthSpec, gen_ar1_contrast, gen_mean_shift, gen_scale_shift
from .tsio import ProblemLoadError, TsParseError, load_problem, read_ts, write_problem

log = logging.getLogger("ftmbench")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class DataError(Exception):
    """Bad or missing input data; maps to exit code 2."""


class UsageError(Exception):
    """Bad combination of arguments; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "NaN"
        return f"{float(v):.17g}"
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _split_list(values: Sequence[str] | None) -> list[str]:
    out = []
    for v in values or []:
        out += [p.strip() for p in v.split(",") if p.strip()]
    return out


# ---------------------------------------------------------------- bench

RESULT_HEADER = ("problem", "feature_set", "resample", "metric", "value")


def _result_stem(problem: str, fs_name: str) -> str:
    return f"{problem}__{fs_name}"


def _discover_problems(root: Path) -> list[str]:
    return sorted(
        d.name for d in root.iterdir()
        if d.is_dir() and (d / f"{d.name}_TRAIN.ts").is_file()
    )


def _external_for(fs: FeatureSet, problem: str) -> FeatureSet:
    src = Path(fs.source)
    if src.is_dir():
        return FeatureSet("external", str(src / f"{problem}.csv"))
    return fs


def _bench_one(args) -> dict:
    root, name, fs_texts, cfg, n_resamples, seed, results_dir, fast_dft = args
    entry = {"problem": name, "status": "ok", "reason": "", "feature_sets": {}}
    try:
        problem = load_problem(root, name)
    except ProblemLoadError as exc:
        entry.update(status="error", reason=str(exc))
        return entry
    for text in fs_texts:
        fs = parse_feature_set(text)
        if fs.kind == "external":
            fs = _external_for(fs, name)
        fs_name = parse_feature_set(text).name
        try:
            res = run_resample_eval(problem, fs, cfg, n_resamples, seed, fast_dft=fast_dft)
        except ProblemExcluded as exc:
            entry["feature_sets"][fs_name] = {"status": "excluded", "reason": str(exc)}
            if entry["status"] == "ok":
                entry.update(status="excluded", reason=f"{fs_name}: {exc}")
            continue
        except (ValueError, OSError) as exc:
            entry["feature_sets"][fs_name] = {"status": "error", "reason": str(exc)}
            entry.update(status="error", reason=f"{fs_name}: {exc}")
            continue
        res.feature_set = fs_name
        stem = _result_stem(name, fs_name)
        _atomic_write(results_dir / f"{stem}.csv", _csv_text(RESULT_HEADER, res.csv_rows()))
        _atomic_write(results_dir / f"{stem}.json", res.to_json() + "\n")
        entry["feature_sets"][fs_name] = {"status": "ok", "mean": res.mean, "sd": res.sd}
    return entry


def cmd_bench(args) -> int:
    root = Path(args.root)
    if not root.is_dir():
        raise DataError(f"unreadable root {root}")
    requested = _split_list(args.problems) or ["all"]
    names = _discover_problems(root) if requested == ["all"] else requested
    if not names:
        raise DataError(f"no problems found under {root}")
    fs_texts = _split_list(args.features) or ["ftm"]
    for text in fs_texts:
        try:
            parse_feature_set(text)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    cfg = TrainConfig(C=args.C, balanced_weights=args.balanced, seed=args.seed)
    out = Path(args.out)
    results_dir = out / "results"
    results_dir.mkdir(parents=True, exist_ok=True)
    work = [(root, n, fs_texts, cfg, args.resamples, args.seed, results_dir, args.fft)
            for n in names]
    if args.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            entries = list(ex.map(_bench_one, work))
    else:
        entries = [_bench_one(w) for w in work]
    for e in entries:
        log.info("%s: %s %s", e["problem"], e["status"], e["reason"])
    manifest = {
        "command": ["ftmbench", *args.argv],
        "version": __version__,
        "seed": args.seed,
        "resamples": args.resamples,
        "feature_sets": [parse_feature_set(t).name for t in fs_texts],
        "config": {"C": cfg.C, "tol": cfg.tol, "max_epochs": cfg.max_epochs,
                   "balanced_weights": cfg.balanced_weights},
        "problems": entries,
    }
    _atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    n_err = sum(e["status"] == "error" for e in entries)
    n_exc = sum(e["status"] == "excluded" for e in entries)
    print(f"{len(entries) - n_err - n_exc} ok, {n_exc} excluded, {n_err} errors; "
          f"results in {results_dir}")
    return EXIT_DATA if n_err else EXIT_OK


# ---------------------------------------------------------------- results lookup

def _results_dir(path: Path) -> Path:
    return path / "results" if (path / "results").is_dir() else path


def _load_result(csv_path: Path) -> EvalResult:
    sidecar = csv_path.with_suffix(".json")
    if not sidecar.is_file():
        raise DataError(f"missing sidecar {sidecar}")
    res = EvalResult.from_dict(json.loads(sidecar.read_text(encoding="utf-8")))
    rows = _read_csv(csv_path)
    if not rows or tuple(rows[0].keys()) != RESULT_HEADER:
        raise DataError(f"{csv_path}: empty or not a result table")
    # the CSV is authoritative for the metric values
    res.values = [float(r["value"]) for r in sorted(rows, key=lambda r: int(r["resample"]))]
    return res


def _collect(selector: str, results: Path | None) -> dict[str, EvalResult]:
    """Results keyed by problem, from a CSV file, a directory, or a feature-set name."""
    p = Path(selector)
    if p.is_file():
        files = [p]
    elif p.is_dir():
        files = sorted(_results_dir(p).glob("*.csv"))
    else:
        if results is None:
            raise DataError(f"{selector!r} is not a file or directory (pass --results)")
        name = parse_feature_set(selector).name
        files = sorted(_results_dir(results).glob(f"*__{name}.csv"))
    out = {}
    for f in files:
        if not f.with_suffix(".json").is_file():
            continue
        res = _load_result(f)
        if res.protocol != "resample":
            continue
        out[res.problem] = res
    if not out:
        raise DataError(f"no result files matched {selector!r}")
    return out


# ---------------------------------------------------------------- chance

CHANCE_HEADER = ("problem", "feature_set", "chance", "mean_accuracy", "sd_accuracy",
                 "n_resamples", "p_value", "beats_chance")


def cmd_chance(args) -> int:
    results = _collect(args.features, Path(args.results))
    rows = []
    for name, res in results.items():
        chance = _chance_from_counts(res.class_counts, args.chance)
        p = t_test_vs_chance(res.values, chance, args.sided)
        rows.append((name, res.feature_set, chance, res.mean, res.sd, len(res.values), p,
                     "true" if p < args.alpha else "false"))
    rows.sort(key=lambda r: (-r[3], r[0]))
    out = Path(args.out) if args.out else Path(args.results) / f"chance_{rows[0][1]}.csv"
    _atomic_write(out, _csv_text(CHANCE_HEADER, rows))
    n_beat = sum(r[7] == "true" for r in rows)
    print(f"{n_beat} of {len(rows)} problems beat chance at alpha={args.alpha}; wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------- compare

COMPARE_HEADER = ("problem", "feature_set_a", "feature_set_b", "mean_diff", "t", "df", "p",
                  "p_adjusted")


def cmd_compare(args) -> int:
    results = Path(args.results) if args.results else None
    a = _collect(args.a, results)
    b = _collect(args.b, results)
    common = sorted(set(a) & set(b))
    for name in sorted(set(a) ^ set(b)):
        log.warning("%s: present in only one result set, skipped", name)
    if not common:
        raise DataError("no problems shared between the two result sets")
    comps = []
    for name in common:
        ra, rb = a[name], b[name]
        if len(ra.values) != len(rb.values):
            raise DataError(f"{name}: resample counts differ ({len(ra.values)} vs "
                            f"{len(rb.values)})")
        if (ra.n_train, ra.n_test) != (rb.n_train, rb.n_test):
            raise DataError(f"{name}: train/test sizes differ between result sets")
        diffs = np.asarray(rb.values) - np.asarray(ra.values)
        comps.append((name, ra.feature_set, rb.feature_set,
                      corrected_t_resample(diffs, ra.n_train, ra.n_test)))
    adjusted = bonferroni([c[3].p_value for c in comps])
    rows = [(n, fa, fb, c.mean_diff, c.t_statistic, c.degrees_of_freedom, c.p_value, pa)
            for (n, fa, fb, c), pa in zip(comps, adjusted)]
    base = results or Path(".")
    out = Path(args.out) if args.out else base / f"compare_{comps[0][1]}_vs_{comps[0][2]}.csv"
    _atomic_write(out, _csv_text(COMPARE_HEADER, rows))
    mean_improvement = float(np.mean([c[3].mean_diff for c in comps]))
    n_nonsig = sum(r[6] >= args.alpha for r in rows)
    summary = {
        "n_problems": len(rows),
        "mean_improvement": mean_improvement,
        "n_not_significant": n_nonsig,
        "alpha": args.alpha,
    }
    _atomic_write(out.with_suffix(".summary.json"),
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"mean improvement ({comps[0][2]} - {comps[0][1]}): {100 * mean_improvement:.2f} "
          f"points over {len(rows)} problems; {n_nonsig} not significant at "
          f"alpha={args.alpha}; wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------- cvbench

def _read_labels(path: Path) -> list[str]:
    rows = _read_csv(path)
    if not rows or set(rows[0]) != {"instance_index", "label"}:
        raise DataError(f"{path}: expected columns instance_index,label")
    idx = {int(r["instance_index"]): r["label"] for r in rows}
    if sorted(idx) != list(range(len(idx))):
        raise DataError(f"{path}: instance_index must cover 0..n-1")
    return [idx[i] for i in range(len(idx))]


def _channel_models(channel_dir: Path, fs_texts: list[str], fast_dft: bool):
    files = sorted(channel_dir.glob("*.ts"))
    if not files:
        raise DataError(f"no .ts channel files in {channel_dir}")
    channels = []
    for f in files:
        try:
            _, insts = read_ts(f)
        except TsParseError as exc:
            raise DataError(f"{f}: {exc}") from None
        channels.append((f.stem, insts))
    labels = [inst.label for inst in channels[0][1]]
    models = {}
    for text in fs_texts:
        fs = parse_feature_set(text)
        per = [extract_matrix(insts, fs, fast_dft=fast_dft) for _, insts in channels]
        try:
            models[fs.name] = assemble_multichannel(per, [c for c, _ in channels])
        except ValueError as exc:
            raise DataError(str(exc)) from None
    return models, labels


def cmd_cvbench(args) -> int:
    if bool(args.model) == bool(args.channels):
        raise UsageError("give either --model NAME=CSV (with --labels) or --channels DIR")
    if args.model:
        if not args.labels:
            raise UsageError("--model requires --labels")
        labels = _read_labels(Path(args.labels))
        models = {}
        for spec in args.model:
            if "=" not in spec:
                raise UsageError(f"--model expects NAME=CSV, got {spec!r}")
            name, path = spec.split("=", 1)
            try:
                models[name] = read_feature_csv(path, labels)
            except (OSError, ValueError) as exc:
                raise DataError(str(exc)) from None
    else:
        models, labels = _channel_models(Path(args.channels),
                                         _split_list(args.features) or ["ftm"], args.fft)
    cfg = TrainConfig(C=args.C, balanced_weights=not args.unbalanced, seed=args.seed)
    try:
        plans = repeated_stratified_kfold(labels, args.k, args.repeats, args.seed)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    shared_hash = fold_plan_hash(plans)
    evals = {}
    for name, m in models.items():
        evals[name] = run_cv_eval(m, labels, cfg, args.k, args.repeats, args.seed,
                                  feature_set=name)
    null = permutation_null(models, labels, cfg, args.k, args.repeats, args.permutations,
                            args.seed, jobs=args.jobs)
    names = list(models)
    pvals = [permutation_pvalue(evals[n].mean, null) for n in names]
    adjusted = bonferroni(pvals)

    out = Path(args.out)
    repeat_rows = [(n, j, v) for n in names for j, v in enumerate(evals[n].values)]
    fold_rows = [(n, j, f, v) for n in names
                 for j, fv in enumerate(evals[n].fold_values) for f, v in enumerate(fv)]
    summary_rows = [(n, evals[n].mean, evals[n].sd, len(models[n].columns), p, pa,
                     evals[n].fold_plan_hash)
                    for n, p, pa in zip(names, pvals, adjusted)]
    comp_rows = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            fa = np.asarray(evals[names[i]].fold_values).ravel()
            fb = np.asarray(evals[names[j]].fold_values).ravel()
            c = corrected_t_kfold(fb - fa, args.k, args.repeats)
            comp_rows.append((names[i], names[j], c.mean_diff, c.t_statistic,
                              c.degrees_of_freedom, c.p_value, c.mode))
    _atomic_write(out / "cv_repeats.csv",
                  _csv_text(("model", "repeat", "balanced_accuracy"), repeat_rows))
    _atomic_write(out / "cv_folds.csv",
                  _csv_text(("model", "repeat", "fold", "balanced_accuracy"), fold_rows))
    _atomic_write(out / "cv_summary.csv",
                  _csv_text(("model", "mean", "sd", "n_features", "p_value", "p_adjusted",
                             "fold_plan_hash"), summary_rows))
    _atomic_write(out / "cv_comparisons.csv",
                  _csv_text(("model_a", "model_b", "mean_diff", "t", "df", "p", "mode"),
                            comp_rows))
    _atomic_write(out / "cv_null.csv",
                  _csv_text(("sample", "balanced_accuracy"), enumerate(null.tolist())))
    report = {
        "command": ["ftmbench", *args.argv],
        "version": __version__,
        "k": args.k, "repeats": args.repeats, "seed": args.seed,
        "permutations": args.permutations, "pooled_null_size": int(null.size),
        "fold_plan_hash": shared_hash,
        "models": {n: evals[n].to_dict() for n in names},
    }
    _atomic_write(out / "cv_report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    for n, mean, sd, _, p, pa, _ in summary_rows:
        print(f"{n}: balanced accuracy {100 * mean:.1f} +/- {100 * sd:.1f}%, "
              f"p={p:.4g} (Bonferroni {pa:.4g})")
    return EXIT_OK


# ---------------------------------------------------------------- plot

def cmd_plot(args) -> int:
    inp = Path(args.input)
    if not inp.is_file():
        raise DataError(f"missing input {inp}")
    if args.kind == "ladder":
        rows = _read_csv(inp)
        if not rows:
            raise DataError(f"{inp}: no rows")
        data = [{"problem": r["problem"], "mean": float(r["mean_accuracy"]),
                 "sd": float(r["sd_accuracy"]), "chance": float(r["chance"])} for r in rows]
        svg = ladder_svg(data, title=args.title)
    elif args.kind in ("scatter", "histogram"):
        if not args.labels:
            raise UsageError(f"{args.kind} needs --labels")
        labels = _read_labels(Path(args.labels))
        m = read_feature_csv(inp, labels)
        if m.n_rows == 0:
            raise DataError(f"{inp}: no rows")
        cols = list(m.columns)

        def col(name):
            if name not in cols:
                raise DataError(f"{inp}: no column {name!r}")
            return m.values[:, cols.index(name)]

        if args.kind == "scatter":
            svg = scatter_svg(col(args.x), col(args.y), labels, args.x, args.y, args.title)
        else:
            svg = histogram_svg(col(args.x), labels, args.x, args.bins, args.title)
    elif args.kind == "paired":
        rows = _read_csv(inp)
        if not rows:
            raise DataError(f"{inp}: no rows")
        series: dict[str, list[float]] = {}
        for r in rows:
            series.setdefault(r["model"], []).append(float(r["balanced_accuracy"]))
        if args.models:
            series = {m: series[m] for m in _split_list(args.models)}
        try:
            svg = paired_svg(series, title=args.title)
        except ValueError as exc:
            raise DataError(str(exc)) from None
    else:
        raise UsageError(f"unknown plot kind {args.kind!r}")
    _atomic_write(Path(args.out), svg)
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- extract / synth

def cmd_extract(args) -> int:
    try:
        problem = load_problem(args.root, args.problem)
    except ProblemLoadError as exc:
        raise DataError(str(exc)) from None
    fs = parse_feature_set(args.features)
    m = problem_features(problem, fs, fast_dft=args.fft)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_feature_csv(m, out / f"{problem.name}__{fs.name}.csv")
    _atomic_write(out / f"{problem.name}__labels.csv",
                  _csv_text(("instance_index", "label"), enumerate(problem.labels)))
    print(f"wrote {m.n_rows} x {len(m.columns)} features to {out}")
    return EXIT_OK


_GENERATORS = {
    "mean_shift": (gen_mean_shift, "delta"),
    "scale_shift": (gen_scale_shift, "ratio"),
    "ar1_contrast": (gen_ar1_contrast, None),
}


def cmd_synth(args) -> int:
    gen, key = _GENERATORS[args.generator]
    params = {}
    if key:
        params[key] = args.param
    else:
        params = {"phi_a": args.phi_a, "phi_b": args.phi_b}
    spec = SynthSpec(args.generator, args.n_per_class, args.length, params, args.seed,
                     args.zscore)
    problem = gen(spec)
    if args.name:
        problem.name = args.name
    path = write_problem(problem, args.out)
    print(f"wrote {path}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ftmbench", description="Mean/std-dev baseline benchmarks for "
                "time-series classification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="30-resample train/test benchmark over .ts problems")
    b.add_argument("--root", required=True, help="archive root holding <Name>/<Name>_TRAIN.ts")
    b.add_argument("--problems", action="append", help="comma list of problem names or 'all'")
    b.add_argument("--features", action="append",
                   help="ftm|dyn10|ftm+dyn10|external:<csv or dir>; repeat or comma-separate")
    b.add_argument("--resamples", type=int, default=30)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--C", type=float, default=1.0)
    b.add_argument("--balanced", action="store_true", help="balanced class weights")
    b.add_argument("--fft", action="store_true", help="FFT periodogram for lowfreq_frac")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("chance", help="one-sample test of resample accuracies against chance")
    c.add_argument("--results", required=True, help="bench output directory")
    c.add_argument("--features", default="ftm")
    c.add_argument("--chance", choices=("majority", "uniform"), default="majority")
    c.add_argument("--sided", choices=("greater", "two"), default="greater")
    c.add_argument("--alpha", type=float, default=0.05)
    c.add_argument("--out")
    c.set_defaults(func=cmd_chance)

    k = sub.add_parser("compare", help="corrected resampled t-test between two feature sets")
    k.add_argument("a", help="result CSV, result directory, or feature-set name")
    k.add_argument("b", help="result CSV, result directory, or feature-set name")
    k.add_argument("--results", help="bench output directory for feature-set names")
    k.add_argument("--alpha", type=float, default=0.05)
    k.add_argument("--out")
    k.set_defaults(func=cmd_compare)

    v = sub.add_parser("cvbench", help="repeated stratified k-fold CV with permutation testing")
    v.add_argument("--model", action="append", help="NAME=feature CSV (repeatable)")
    v.add_argument("--labels", help="CSV with instance_index,label")
    v.add_argument("--channels", help="directory of per-channel .ts files (same instances)")
    v.add_argument("--features", action="append", help="feature sets for --channels")
    v.add_argument("--k", type=int, default=10)
    v.add_argument("--repeats", type=int, default=10)
    v.add_argument("--permutations", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--C", type=float, default=1.0)
    v.add_argument("--unbalanced", action="store_true", help="disable balanced class weights")
    v.add_argument("--fft", action="store_true")
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_cvbench)

    g = sub.add_parser("plot", help="SVG charts")
    g.add_argument("kind", choices=("ladder", "scatter", "histogram", "paired"))
    g.add_argument("input", help="chance CSV (ladder), feature CSV (scatter/histogram) "
                   "or cv_repeats.csv (paired)")
    g.add_argument("--labels", help="instance_index,label CSV for scatter/histogram")
    g.add_argument("--x", default="mean")
    g.add_argument("--y", default="stddev")
    g.add_argument("--bins", type=int, default=30)
    g.add_argument("--models", help="comma list of models for paired")
    g.add_argument("--title", default="")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_plot)

    e = sub.add_parser("extract", help="write a problem's feature matrix and labels as CSV")
    e.add_argument("--root", required=True)
    e.add_argument("--problem", required=True)
    e.add_argument("--features", default="ftm")
    e.add_argument("--fft", action="store_true")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_extract)

    s = sub.add_parser("synth", help="write a synthetic problem in the archive layout")
    s.add_argument("generator", choices=sorted(_GENERATORS))
    s.add_argument("--param", type=float, default=0.0, help="delta or ratio")
    s.add_argument("--phi-a", type=float, default=0.8)
    s.add_argument("--phi-b", type=float, default=-0.8)
    s.add_argument("--n-per-class", type=int, default=50)
    s.add_argument("--length", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--zscore", action="store_true")
    s.add_argument("--name")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ftmbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ProblemLoadError, TsParseError, OSError) as exc:
        print(f"ftmbench: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"ftmbench: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
