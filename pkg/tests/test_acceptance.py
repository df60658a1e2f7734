"""Acceptance suite: one test per numbered criterion.

Each test records PASS/FAIL/SKIP through the ``criterion`` fixture; the
summary block at the end of the pytest run lists every criterion on its own
line. Criterion 1 needs the real archive and runs only when
``FTMBENCH_ARCHIVE`` points at its root.
"""

import csv
import math
import os
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from ftmbench.cli import main
from ftmbench.evaluation import (
    fit_on_rows,
    permutation_null,
    permutation_pvalue,
    run_cv_eval,
    run_resample_eval,
    stratified_resamples,
)
from ftmbench.features import (
    FTM,
    FeatureMatrix,
    autocorrelation,
    dft_power,
    dyn10,
    ftm,
    write_feature_csv,
    znorm_series,
)
from ftmbench.stats import corrected_t_kfold, corrected_t_resample, student_t_sf
from ftmbench.svm import TrainConfig, train_binary
from ftmbench.synth import SynthSpec, gen_ar1_contrast, gen_mean_shift, gen_null
from ftmbench.tsio import load_problem, write_problem


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_criterion_01_archive_perfect_problems(criterion):
    crit = criterion(1, "archive: FTM perfect on GunPointOldVersusYoung and InsectEPGRegularTrain")
    root = os.environ.get("FTMBENCH_ARCHIVE")
    if not root:
        crit.skipped("FTMBENCH_ARCHIVE not set; archive-gated criterion")
    start = time.perf_counter()
    for name in ("GunPointOldVersusYoung", "InsectEPGRegularTrain"):
        problem = load_problem(root, name)
        res = run_resample_eval(problem, FTM, n=30, seed=0)
        assert res.mean >= 0.99, (name, res.mean)
        assert res.values[0] == 1.0, (name, res.values[0])
    assert time.perf_counter() - start < 120
    crit.passed()


def test_criterion_02_mean_shift(criterion):
    crit = criterion(2, "mean shift: FTM >= 0.99; z-scored FTM in [0.40, 0.60]; < 30 s")
    start = time.perf_counter()
    raw = gen_mean_shift(SynthSpec("mean_shift", 50, 100, {"delta": 3.0}, seed=0))
    zs = gen_mean_shift(SynthSpec("mean_shift", 50, 100, {"delta": 3.0}, seed=0,
                                  z_score_each_series=True))
    acc_raw = run_resample_eval(raw, FTM, n=30).mean
    acc_z = run_resample_eval(zs, FTM, n=30).mean
    elapsed = time.perf_counter() - start
    assert acc_raw >= 0.99, acc_raw
    assert 0.40 <= acc_z <= 0.60, acc_z
    assert elapsed < 30, elapsed
    crit.passed()


def test_criterion_03_ar1_contrast(criterion, tmp_path):
    crit = criterion(3, "AR(1) contrast: DYN10 >= 0.85, FTM in [0.40, 0.60], compare p < 0.01; < 60 s")
    start = time.perf_counter()
    p = gen_ar1_contrast(SynthSpec("ar1_contrast", 50, 100, {"phi_a": 0.8, "phi_b": -0.8},
                                   seed=0))
    root, out = tmp_path / "archive", tmp_path / "out"
    write_problem(p, root)
    assert main(["bench", "--root", str(root), "--features", "ftm,dyn10", "--out", str(out)]) == 0
    cmp_csv = tmp_path / "cmp.csv"
    assert main(["compare", "ftm", "dyn10", "--results", str(out), "--out", str(cmp_csv)]) == 0
    elapsed = time.perf_counter() - start
    acc = {fs: np.mean([float(r["value"]) for r in _rows(out / "results" / f"{p.name}__{fs}.csv")])
           for fs in ("ftm", "dyn10")}
    comp = _rows(cmp_csv)[0]
    assert acc["dyn10"] >= 0.85, acc
    assert 0.40 <= acc["ftm"] <= 0.60, acc
    assert float(comp["mean_diff"]) > 0 and float(comp["p"]) < 0.01, comp
    assert elapsed < 60, elapsed
    crit.passed()


def _random_series(rng):
    n = int(rng.integers(10, 300))
    kind = rng.integers(3)
    if kind == 0:
        x = rng.normal(size=n)
    elif kind == 1:
        x = np.cumsum(rng.normal(size=n))
    else:
        x = np.sin(np.arange(n) * rng.uniform(0.05, 2.0)) + 0.3 * rng.normal(size=n)
    return x * rng.uniform(0.1, 10) + rng.uniform(-5, 5)


def test_criterion_04_affine_invariance(criterion):
    crit = criterion(4, "affine invariance: 1000 triples, dyn10 and ftm to 1e-9")
    rng = np.random.default_rng(2024)
    worst_dyn, worst_ftm = 0.0, 0.0
    for _ in range(1000):
        x = _random_series(rng)
        a, b = rng.uniform(0.1, 10), rng.uniform(-5, 5)
        y = a * x + b
        worst_dyn = max(worst_dyn, float(np.max(np.abs(dyn10(y) - dyn10(x)))))
        mu, sd = ftm(x)
        mu2, sd2 = ftm(y)
        worst_ftm = max(worst_ftm, abs(mu2 - (a * mu + b)), abs(sd2 - a * sd))
    assert worst_dyn <= 1e-9, worst_dyn
    assert worst_ftm <= 1e-9, worst_ftm
    crit.passed()


def _quad_sf(t, df):
    with mpmath.workdps(30):
        nu = mpmath.mpf(df)
        c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
        return float(mpmath.quad(lambda s: c * (1 + s * s / nu) ** (-(nu + 1) / 2),
                                 [mpmath.mpf(t), 0, mpmath.inf] if t < 0
                                 else [mpmath.mpf(t), mpmath.inf]))


def test_criterion_05_numeric_oracles(criterion):
    crit = criterion(5, "numeric oracles: ACF/MSSD identity, Parseval, t survival vs quadrature")
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        z = znorm_series(_random_series(rng))
        n = z.size
        lhs = np.sum(np.diff(z) ** 2)
        rhs = 2 * n - z[0] ** 2 - z[-1] ** 2 - 2 * n * autocorrelation(z)[1]
        worst = max(worst, abs(lhs - rhs) / (n - 1))
    assert worst <= 1e-9, worst

    for n in (10, 11, 64, 257, 1000):
        z = znorm_series(rng.normal(size=n))
        energy = n * np.sum(z * z)
        assert abs(dft_power(z).sum() - energy) <= 1e-6 * energy

    worst_t = 0.0
    for df in range(1, 31):
        for t in np.linspace(-10, 10, 21):
            worst_t = max(worst_t, abs(student_t_sf(float(t), df) - _quad_sf(float(t), df)))
    assert worst_t <= 1e-8, worst_t
    crit.passed()


def test_criterion_06_corrected_t(criterion):
    crit = criterion(6, "corrected t: [1,2,3,2] ratio 1/3 gives t=3.2071 df=3; k-fold ratio 1/9")
    res = corrected_t_resample([1, 2, 3, 2], n_train=3, n_test=1)
    assert abs(res.t_statistic - 3.2071) <= 1e-4 and res.degrees_of_freedom == 3
    kf = corrected_t_kfold(np.linspace(-0.1, 0.2, 100), 10, 10)
    assert kf.correction_ratio == 1 / 9
    z = corrected_t_resample([0.0] * 4, 3, 1)
    assert (z.t_statistic, z.p_value) == (0.0, 1.0)
    pos = corrected_t_resample([0.2] * 4, 3, 1)
    assert pos.t_statistic == math.inf and pos.p_value == 0.0
    crit.passed()


def _blobs(seed, n=20, d=2, gap=4.0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(-gap / 2, 0.4, (n, d)), rng.normal(gap / 2, 0.4, (n, d))])
    return X, np.r_[-np.ones(n), np.ones(n)]


def test_criterion_07_svm(criterion):
    crit = criterion(7, "SVM: feasibility, reconstruction, monotone primal, blobs, 2-point")
    failures = []
    fixtures = [_blobs(s) for s in range(5)]
    fixtures.append((np.array([[-1.0], [1.0]]), np.array([-1.0, 1.0])))
    cfg = TrainConfig()
    for i, (X, y) in enumerate(fixtures):
        m = train_binary(X, y, cfg)
        if not (np.all(m.dual_coeffs >= 0) and np.all(m.dual_coeffs <= cfg.C)):
            failures.append(f"fixture {i}: dual infeasible")
        Xa = np.hstack([X, np.ones((len(y), 1))])
        w = (m.dual_coeffs * y) @ Xa
        if np.max(np.abs(w - np.r_[m.weights, m.bias])) > 1e-8:
            failures.append(f"fixture {i}: weight reconstruction")
        rises = np.diff(np.asarray(m.objective_trace))
        if rises.size and rises.max() > 1e-10:
            failures.append(f"fixture {i}: primal objective rose by {rises.max():.3g} "
                            f"between epochs")
        if not np.all(np.sign(m.decision(X)) == y):
            failures.append(f"fixture {i}: training accuracy below 100%")
    two = train_binary(*fixtures[-1], cfg)
    if abs(-two.bias / two.weights[0]) > 1e-6:
        failures.append("2-point boundary off 0")
    assert not failures, "; ".join(failures)
    crit.passed()


@pytest.mark.slow
def test_criterion_08_permutation_calibration(criterion):
    crit = criterion(8, "permutation calibration: 200 null problems, rate of p <= 0.05 in [0.02, 0.08]")
    assert permutation_pvalue(1.0, np.zeros(99)) == 1 / 100
    assert permutation_pvalue(1.0, np.zeros(999)) == 1 / 1000
    cfg = TrainConfig(balanced_weights=True)
    pvals = []
    for seed in range(200):
        m, labels = gen_null(SynthSpec("null", 20, 10, seed=seed))
        observed = run_cv_eval(m, labels, cfg, k=5, r=2, seed=seed).mean
        null = permutation_null(m, labels, cfg, k=5, r=2, n_perm=99, seed=seed)
        pvals.append(permutation_pvalue(observed, null))
    rate = float(np.mean(np.asarray(pvals) <= 0.05))
    assert min(pvals) >= 1 / 100
    assert 0.02 <= rate <= 0.08, rate
    crit.passed()


def test_criterion_09_protocol_integrity(criterion, tmp_path):
    crit = criterion(9, "protocol: resample 0 designated, counts kept, shared fold hashes, no leakage")
    p = gen_mean_shift(SynthSpec("mean_shift", 12, 20, {"delta": 1.0}, seed=3))
    labels = np.array(p.labels)
    n_train = len(p.train)
    plans = stratified_resamples(p, 30, seed=0)
    assert plans[0].train_indices.tolist() == list(range(n_train))
    assert plans[0].test_indices.tolist() == list(range(n_train, len(labels)))
    for plan in plans:
        for c, cnt in p.class_counts("train").items():
            assert np.count_nonzero(labels[plan.train_indices] == c) == cnt
        for c, cnt in p.class_counts("test").items():
            assert np.count_nonzero(labels[plan.test_indices] == c) == cnt

    ftm_m, lab_list = gen_null(SynthSpec("null", 15, 10, seed=0))
    other = FeatureMatrix(ftm_m.values[:, :3], ftm_m.columns[:3], lab_list)
    args = []
    for name, m in (("all", ftm_m), ("first3", other)):
        write_feature_csv(m, tmp_path / f"{name}.csv")
        args += ["--model", f"{name}={tmp_path / f'{name}.csv'}"]
    (tmp_path / "labels.csv").write_text(
        "instance_index,label\n" + "".join(f"{i},{v}\n" for i, v in enumerate(lab_list)))
    assert main(["cvbench", *args, "--labels", str(tmp_path / "labels.csv"), "--k", "5",
                 "--repeats", "2", "--permutations", "5", "--out", str(tmp_path / "cv")]) == 0
    hashes = {r["fold_plan_hash"] for r in _rows(tmp_path / "cv" / "cv_summary.csv")}
    assert len(hashes) == 1

    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 4))
    labs = ["A"] * 20 + ["B"] * 20
    rows = np.arange(0, 40, 2)
    X2 = X.copy()
    X2[1::2] = rng.normal(size=(20, 4)) * 1e3
    labs2 = [lab if i % 2 == 0 else "B" for i, lab in enumerate(labs)]
    s1, m1 = fit_on_rows(FeatureMatrix(X, list("abcd"), labs), labs, rows, TrainConfig())
    s2, m2 = fit_on_rows(FeatureMatrix(X2, list("abcd"), labs2), labs2, rows, TrainConfig())
    assert s1.center.tobytes() == s2.center.tobytes() and s1.scale.tobytes() == s2.scale.tobytes()
    for a, b in zip(m1.pairs, m2.pairs):
        assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias
        assert a.dual_coeffs.tobytes() == b.dual_coeffs.tobytes()
    crit.passed()


def _outputs(run_dir: Path) -> dict[str, bytes]:
    return {str(p.relative_to(run_dir)): p.read_bytes()
            for p in sorted(run_dir.rglob("*")) if p.suffix in (".csv", ".svg")}


def _pipeline(base: Path, archive: Path, labels: Path, models: list[str], jobs: int) -> Path:
    run = base / f"run{jobs}_{len(list(base.glob('run*')))}"
    j = str(jobs)
    assert main(["bench", "--root", str(archive), "--features", "ftm,dyn10", "--resamples", "5",
                 "--jobs", j, "--out", str(run / "bench")]) == 0
    assert main(["chance", "--results", str(run / "bench"), "--out",
                 str(run / "chance.csv")]) == 0
    assert main(["compare", "ftm", "dyn10", "--results", str(run / "bench"), "--out",
                 str(run / "compare.csv")]) == 0
    model_args = [a for spec in models for a in ("--model", spec)]
    assert main(["cvbench", *model_args, "--labels", str(labels), "--k", "5", "--repeats", "2",
                 "--permutations", "6", "--jobs", j, "--out", str(run / "cv")]) == 0
    assert main(["plot", "ladder", str(run / "chance.csv"), "--out",
                 str(run / "ladder.svg")]) == 0
    assert main(["plot", "paired", str(run / "cv" / "cv_repeats.csv"), "--out",
                 str(run / "paired.svg")]) == 0
    assert main(["plot", "scatter", models[0].split("=", 1)[1], "--labels", str(labels),
                 "--x", "x0", "--y", "x1", "--out", str(run / "scatter.svg")]) == 0
    return run


def test_criterion_10_determinism(criterion, tmp_path):
    crit = criterion(10, "determinism: byte-identical CSV/SVG across reruns and --jobs")
    archive = tmp_path / "archive"
    for i, gen in enumerate((gen_mean_shift, gen_ar1_contrast)):
        spec = SynthSpec(gen.__name__[4:], 10, 30, {"delta": 1.0} if i == 0 else {}, seed=i)
        write_problem(gen(spec), archive)
    m, labels = gen_null(SynthSpec("null", 12, 10, seed=9))
    write_feature_csv(m, tmp_path / "null.csv")
    write_feature_csv(FeatureMatrix(m.values[:, :2], m.columns[:2], labels), tmp_path / "two.csv")
    lab = tmp_path / "labels.csv"
    lab.write_text("instance_index,label\n" + "".join(f"{i},{v}\n" for i, v in enumerate(labels)))
    models = [f"null={tmp_path / 'null.csv'}", f"two={tmp_path / 'two.csv'}"]
    runs = [_pipeline(tmp_path, archive, lab, models, jobs) for jobs in (1, 1, 2)]
    ref = _outputs(runs[0])
    assert len(ref) >= 10
    for other in runs[1:]:
        got = _outputs(other)
        assert got.keys() == ref.keys()
        diff = [k for k in ref if ref[k] != got[k]]
        assert not diff, diff
    crit.passed()
