import numpy as np
import pytest

from ftmbench.tsio import LabeledInstance, Problem, RawSeries

_ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, desc, status in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:>2} {status:<4} {desc}")


@pytest.fixture
def criterion():
    """Record a pass/fail/skip line for one acceptance criterion."""

    class _Recorder:
        def __init__(self):
            self.entry = None

        def __call__(self, number, desc):
            self.entry = [number, desc, "FAIL"]
            _ACCEPTANCE.append(self.entry)
            return self

        def passed(self):
            self.entry[2] = "PASS"

        def skipped(self, reason):
            self.entry[2] = "SKIP"
            pytest.skip(reason)

    return _Recorder()


def make_problem(train, test, name="toy"):
    """Build a Problem from (values, label) pairs."""
    tr = [LabeledInstance(RawSeries(np.asarray(v, float)), lab) for v, lab in train]
    te = [LabeledInstance(RawSeries(np.asarray(v, float)), lab) for v, lab in test]
    classes = list(dict.fromkeys(lab for _, lab in train + test))
    lengths = {len(v) for v, _ in train + test}
    return Problem(name, tr, te, classes, equal_length=len(lengths) == 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
