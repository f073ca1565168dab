"""Statistical toolbox shared by the Monte Carlo experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import ConfigError

__all__ = [
    "MCAccumulator", "merge_accumulators", "FitResult", "fit_power_law",
    "KSResult", "ks_two_sample", "joint_cumulant", "jackknife",
]


@dataclass
class MCAccumulator:
    """Streaming count, mean, centred second moment, extremes and an optional histogram.

    ``add`` and ``merge`` use the pairwise update of Chan, Golub and LeVeque,
    so shards can be combined in any fixed order without loss of accuracy.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    minimum: float = math.inf
    maximum: float = -math.inf
    edges: np.ndarray | None = None
    counts: np.ndarray | None = field(default=None)

    @classmethod
    def with_histogram(cls, edges):
        edges = np.asarray(edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ConfigError("histogram edges must be a strictly increasing 1D array")
        return cls(edges=edges, counts=np.zeros(edges.size - 1, dtype=np.int64))

    def add(self, values):
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return self
        shard = MCAccumulator(
            count=values.size, mean=float(values.mean()),
            m2=float(np.sum((values - values.mean()) ** 2)),
            minimum=float(values.min()), maximum=float(values.max()),
        )
        if self.edges is not None:
            shard.edges = self.edges
            shard.counts = np.histogram(values, self.edges)[0].astype(np.int64)
        merged = merge_accumulators([self, shard])
        self.__dict__.update(merged.__dict__)
        return self

    @property
    def variance(self):
        """Unbiased sample variance (``nan`` below two observations)."""
        return self.m2 / (self.count - 1) if self.count > 1 else math.nan

    @property
    def sem(self):
        return math.sqrt(self.variance / self.count) if self.count > 1 else math.nan


def _merge_pair(a, b):
    if (a.edges is None) != (b.edges is None) or (
            a.edges is not None and not np.array_equal(a.edges, b.edges)):
        raise ConfigError("cannot merge accumulators with different histogram edges")
    if b.count == 0:
        return MCAccumulator(a.count, a.mean, a.m2, a.minimum, a.maximum, a.edges,
                             None if a.counts is None else a.counts.copy())
    if a.count == 0:
        return _merge_pair(b, a)
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * b.count / n
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / n
    counts = None if a.counts is None else a.counts + b.counts
    return MCAccumulator(n, mean, m2, min(a.minimum, b.minimum), max(a.maximum, b.maximum),
                         a.edges, counts)


def merge_accumulators(accs):
    """Merge in a fixed pairwise tree so the result does not depend on worker count."""
    accs = list(accs)
    if not accs:
        return MCAccumulator()
    while len(accs) > 1:
        nxt = [_merge_pair(accs[i], accs[i + 1]) for i in range(0, len(accs) - 1, 2)]
        if len(accs) % 2:
            nxt.append(accs[-1])
        accs = nxt
    return _merge_pair(accs[0], MCAccumulator(edges=accs[0].edges))


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr_slope: float
    r_squared: float


def fit_power_law(xs, ys):
    """Least-squares line through ``(log x, log y)``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.size < 3:
        raise ConfigError("power-law fit needs at least three (x, y) pairs")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ConfigError("power-law fit needs positive data")
    lx, ly = np.log(xs), np.log(ys)
    if np.ptp(ly) == 0.0:
        return FitResult(0.0, float(ly[0]), 0.0, 1.0)
    res = sps.linregress(lx, ly)
    return FitResult(float(res.slope), float(res.intercept), float(res.stderr), float(res.rvalue ** 2))


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    n1: int
    n2: int

    def rejects(self, alpha=0.01):
        return self.p_value < alpha


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov test on sorted samples, asymptotic p-value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1:
        raise ConfigError("KS samples must be one-dimensional")
    if a.size < 8 or b.size < 8:
        raise ConfigError(f"KS test needs at least 8 points per sample, got {a.size} and {b.size}")
    if np.any(np.diff(a) < 0) or np.any(np.diff(b) < 0):
        raise ConfigError("KS samples must be sorted ascending")
    grid = np.concatenate((a, b))
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = a.size * b.size / (a.size + b.size)
    p = float(sps.kstwobign.sf(d * math.sqrt(en))) if d > 0 else 1.0
    return KSResult(d, min(1.0, max(0.0, p)), a.size, b.size)


def _set_partitions(items):
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def joint_cumulant(samples, i, j):
    r"""Empirical joint cumulant of ``i`` copies of ``x`` and ``j`` of ``conj(x)``.

    Moment-to-cumulant formula over set partitions:
    ``kappa = sum_pi (|pi| - 1)! (-1)^(|pi| - 1) prod_B E prod_{b in B} x_b``.
    """
    x = np.asarray(samples).ravel()
    r = i + j
    if r < 1:
        raise ConfigError("cumulant order must be positive")
    moments = {}

    def moment(block):
        key = tuple(sorted(block))
        if key not in moments:
            n_plain = sum(1 for b in key if b < i)
            moments[key] = complex(np.mean(x ** n_plain * np.conj(x) ** (len(key) - n_plain)))
        return moments[key]

    total = 0j
    for part in _set_partitions(list(range(r))):
        k = len(part)
        total += math.factorial(k - 1) * (-1) ** (k - 1) * math.prod(moment(b) for b in part)
    return total


def jackknife(values, statistic, batches=20):
    """Delete-one-batch jackknife: ``(estimate, standard_error)`` of ``statistic``.

    ``values`` is split along its first axis into ``batches`` contiguous groups.
    """
    values = np.asarray(values)
    if values.shape[0] < batches:
        raise ConfigError(f"jackknife needs at least {batches} observations")
    groups = np.array_split(np.arange(values.shape[0]), batches)
    full = statistic(values)
    loo = np.array([statistic(np.delete(values, g, axis=0)) for g in groups])
    g = len(groups)
    se = math.sqrt((g - 1) / g * float(np.sum(np.abs(loo - loo.mean()) ** 2)))
    return full, se
