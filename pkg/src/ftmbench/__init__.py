"""Mean and standard-deviation baselines for time-series classification benchmarks."""

__version__ = "0.1.0"
