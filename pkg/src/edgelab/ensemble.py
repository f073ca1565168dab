r"""I.i.d. and Ginibre matrix ensembles and the Ornstein-Uhlenbeck interpolation.

Entries are ``x_ab = n**-0.5 * chi`` with a centred, unit-variance law ``chi``.
Complex entries are ``(a + 1j*b)/sqrt(2)`` with ``a, b`` i.i.d. copies of the
real law, so that ``E chi**2 = 0`` and ``E|chi|**2 = 1``.

=============== ============================ ========= ===========
name            real law of ``chi``          symmetric has density
=============== ============================ ========= ===========
gaussian        N(0, 1)                      yes       yes
uniform         U(-sqrt 3, sqrt 3)           yes       yes
laplace         Laplace(0, 1/sqrt 2)         yes       yes
bernoulli_pm1   +-1 with probability 1/2     yes       no
exponential     Exp(1) - 1                   no        yes
=============== ============================ ========= ===========

Randomness is drawn from counter-based Philox generators keyed by
``(seed, stream, lane, law)``, so every sample is reproducible on its own and
independent workers never share generator state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import ConfigError

__all__ = [
    "DISTRIBUTIONS", "FIELDS", "EnsembleSpec", "MatrixSample", "FlowPoint",
    "law_tag", "generator", "draw_chi", "sample_iid", "sample_ginibre", "flow_point",
    "interpolate_ou", "base_cumulant", "theoretical_cumulant",
]

DISTRIBUTIONS = ("gaussian", "uniform", "laplace", "bernoulli_pm1", "exponential")
FIELDS = ("real", "complex")

# lane 0: the matrix itself; lane 1: the independent Ginibre partner on the flow
_LANE_SAMPLE = 0
_LANE_FLOW = 1

# Cumulants k_r, r = 2..6, of the unit-variance real laws above.
#   uniform on [-h, h], h = sqrt 3:   k_r = B_r (2h)^r / r
#   Laplace with scale b = 1/sqrt 2:   k_2m = 2 (2m-1)! b^2m
#   Rademacher:                        log cosh t = t^2/2 - t^4/12 + t^6/45 - ...
#   Exp(1) - 1:                        k_r = (r-1)!
_CUMULANTS = {
    "gaussian": {2: Fraction(1)},
    "uniform": {2: Fraction(1), 4: Fraction(-6, 5), 6: Fraction(48, 7)},
    "laplace": {2: Fraction(1), 4: Fraction(3), 6: Fraction(30)},
    "bernoulli_pm1": {2: Fraction(1), 4: Fraction(-2), 6: Fraction(16)},
    "exponential": {r: Fraction(math.factorial(r - 1)) for r in range(2, 7)},
}
MAX_CUMULANT_ORDER = 6


def _check_names(distribution, field):
    if distribution not in DISTRIBUTIONS:
        raise ConfigError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    if field not in FIELDS:
        raise ConfigError(f"unknown field {field!r}; expected 'real' or 'complex'")


@dataclass(frozen=True)
class EnsembleSpec:
    """Configuration of an i.i.d. ensemble: entry law, field, size and seed."""

    n: int
    field: str = "complex"
    distribution: str = "gaussian"
    seed: int = 0
    label: str = ""

    def __post_init__(self):
        _check_names(self.distribution, self.field)
        if int(self.n) < 1:
            raise ConfigError(f"matrix dimension must be positive, got n={self.n}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def no_density(self):
        """True for laws without a density (tiny singular values are then possible)."""
        return self.distribution == "bernoulli_pm1"

    @property
    def symmetric(self):
        return self.distribution != "exponential"

    def with_n(self, n):
        return EnsembleSpec(n, self.field, self.distribution, self.seed, self.label)


@dataclass(frozen=True)
class MatrixSample:
    """A drawn matrix together with the ``(spec, stream)`` that reproduces it.

    Real samples are stored with a float dtype; their imaginary part is
    identically zero by construction.
    """

    entries: np.ndarray
    spec: EnsembleSpec
    stream: int
    lane: int = 0

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def field(self):
        return self.spec.field


@dataclass(frozen=True)
class FlowPoint:
    """A time ``t`` on the OU flow and the coupled pair ``(x0, xg)`` it mixes."""

    t: float
    x0: MatrixSample
    xg: MatrixSample = dc_field(repr=False)

    def __post_init__(self):
        if self.x0.n != self.xg.n or self.x0.field != self.xg.field:
            raise ConfigError("flow endpoints must share dimension and field")
        if self.xg.spec.distribution != "gaussian":
            raise ConfigError("the flow partner xg must be Ginibre")


def law_tag(distribution, field):
    """Small integer identifying ``(distribution, field)`` inside the generator key."""
    _check_names(distribution, field)
    return DISTRIBUTIONS.index(distribution) * len(FIELDS) + FIELDS.index(field)


def generator(seed, stream, lane=0, tag=0):
    """Counter-based generator for the substream ``(seed, stream, lane, tag)``.

    ``tag`` separates entry laws, so ensembles that share a seed and stream
    index are still independent of each other.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(lane), int(tag)))
    return np.random.Generator(np.random.Philox(ss))


def draw_chi(rng, distribution, size):
    """Draw real, centred, unit-variance variates of the named law."""
    if distribution == "gaussian":
        return rng.standard_normal(size)
    if distribution == "uniform":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size)
    if distribution == "laplace":
        return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size)
    if distribution == "bernoulli_pm1":
        return 2.0 * rng.integers(0, 2, size) - 1.0
    if distribution == "exponential":
        return rng.standard_exponential(size) - 1.0
    raise ConfigError(f"unknown distribution {distribution!r}")


def _draw_entries(rng, distribution, field, shape):
    if field == "real":
        return draw_chi(rng, distribution, shape)
    re = draw_chi(rng, distribution, shape)
    im = draw_chi(rng, distribution, shape)
    return (re + 1j * im) / math.sqrt(2.0)


def sample_iid(spec, stream, lane=_LANE_SAMPLE):
    """Draw the matrix ``X`` of stream ``stream``; deterministic in ``(spec.seed, stream)``."""
    rng = generator(spec.seed, stream, lane, law_tag(spec.distribution, spec.field))
    chi = _draw_entries(rng, spec.distribution, spec.field, (spec.n, spec.n))
    return MatrixSample(chi / math.sqrt(spec.n), spec, int(stream), lane)


def sample_ginibre(n, field="complex", stream=0, seed=0, lane=_LANE_SAMPLE):
    """Real or complex Ginibre matrix with entry variance ``1/n``."""
    if int(n) < 1:
        raise ConfigError("Ginibre dimension must be positive")
    return sample_iid(EnsembleSpec(int(n), field, "gaussian", seed), stream, lane)


def flow_point(spec, stream, t):
    """Couple stream ``stream`` of ``spec`` with its own independent Ginibre partner."""
    x0 = sample_iid(spec, stream)
    xg = sample_ginibre(spec.n, spec.field, stream, spec.seed, lane=_LANE_FLOW)
    return FlowPoint(t, x0, xg)


def interpolate_ou(fp):
    r"""Return ``X_t = exp(-t/2) x0 + sqrt(1 - exp(-t)) xg``.

    This is the flow ``dX = -X dt/2 + dB/sqrt(n)`` sampled through its exact
    law. ``t = inf`` returns ``xg`` itself and ``t = 0`` returns ``x0``.
    """
    t = float(fp.t)
    if math.isnan(t) or t < 0:
        raise ConfigError(f"flow time must be nonnegative, got {fp.t}")
    if t == 0.0:
        return fp.x0
    if math.isinf(t):
        return fp.xg
    a = math.exp(-t / 2.0)
    b = math.sqrt(-math.expm1(-t))
    return MatrixSample(a * fp.x0.entries + b * fp.xg.entries, fp.x0.spec, fp.x0.stream, fp.x0.lane)


def base_cumulant(distribution, r):
    """Cumulant of order ``r`` of the real unit-variance law (exact rational)."""
    if distribution not in _CUMULANTS:
        raise ConfigError(f"unknown distribution {distribution!r}")
    if r < 1 or r > MAX_CUMULANT_ORDER:
        raise ConfigError(f"cumulants are tabulated for orders 1..{MAX_CUMULANT_ORDER}, got {r}")
    return _CUMULANTS[distribution].get(r, Fraction(0))


def _entry_cumulant(distribution, field, i, j):
    r = i + j
    k = float(base_cumulant(distribution, r))
    if field == "real":
        return complex(k)
    # chi = (a + ib)/sqrt2 with a, b independent: mixed cumulants vanish, so
    # kappa_{i,j}(chi) = 2^{-r/2} k_r (1 + i^i (-i)^j)
    return 2.0 ** (-r / 2.0) * k * (1.0 + 1j ** (i - j))


def theoretical_cumulant(distribution, field, i, j, t=0.0):
    r"""Joint cumulant of ``i`` copies of ``chi_t`` and ``j`` of its conjugate.

    Along the OU flow ``kappa_ij(chi_t) = exp(-(i+j) t/2) kappa_ij(chi)`` plus
    ``(1 - exp(-t)) kappa_ij(g)`` when ``i + j == 2``, ``g`` standard Gaussian of
    the same field.
    """
    _check_names(distribution, field)
    i, j = int(i), int(j)
    if i < 0 or j < 0 or i + j < 1:
        raise ConfigError("cumulant indices must satisfy i, j >= 0 and i + j >= 1")
    if i + j > MAX_CUMULANT_ORDER:
        raise ConfigError(f"unsupported cumulant order {i + j} > {MAX_CUMULANT_ORDER}")
    t = float(t)
    if t < 0:
        raise ConfigError("flow time must be nonnegative")
    r = i + j
    decay = 0.0 if math.isinf(t) else math.exp(-r * t / 2.0)
    value = decay * _entry_cumulant(distribution, field, i, j)
    if r == 2:
        value += (1.0 - decay) * _entry_cumulant("gaussian", field, i, j)
    return value
