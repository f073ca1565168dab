r"""Linear eigenvalue statistics through Girko's Hermitization identity.

For a rescaled test function ``f_{z0}(z) = n f(sqrt(n)(z - z0))``

    (1/n) sum_i f_{z0}(sigma_i) = (1/4 pi n) int Lap f_{z0}(z) log|det H^z| dz,

and ``log|det H^z| = 2 sum_j log s_j(X - z)``. All ``z``-integrals are taken
in the local coordinate ``w = sqrt(n)(z - z0)``, where
``int Lap f_{z0}(z) g(z) dz = n int Lap f(w) g(z0 + w/sqrt n) dw``.

The ``eta``-split of the log-determinant gives

    lhs - det_term = I1 + I2 + I3 + I4,

with ``det_term = (1/pi) int_D f_{z0}``. Since
``int_0^inf (Im m^z(i eta) - 1/(1+eta)) d eta`` is exactly the log-potential of
the uniform law on the unit disk, the split is an identity at every finite
``n``; its residual measures quadrature error only.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from . import dyson
from .errors import ConfigError, NumericalError
from .spectral import singular_values_batch

__all__ = [
    "TestFunction", "make_bump", "linear_statistic", "deterministic_term",
    "ZGrid", "girko_logdet_rhs", "eta_integral_closed_form",
    "GirkoDecomposition", "decompose_I", "default_eta0", "default_T",
    "write_decomposition_csv",
]

_TINY_SINGULAR = 1e-13


@dataclass(frozen=True)
class TestFunction:
    r"""Radial bump ``f(w) = phi(|w - center|/R)`` supported in ``|w - center| <= R``.

    ``mollifier``: ``phi = exp(1 - 1/(1 - rho^2))``;
    ``polynomial``: ``phi = (1 - rho^2)^p``. Both have ``max f = f(center) = 1``.
    """

    __test__ = False  # not a pytest class

    kind: str
    radius: float
    power: int = 0
    center: complex = 0j

    def _q(self, r):
        return 1.0 - (np.asarray(r, dtype=float) / self.radius) ** 2

    # Derivatives are taken in s = r^2: for a radial g(s), Lap = 4 (s g'' + g').
    def _g_derivs(self, r):
        r = np.asarray(r, dtype=float)
        q = self._q(r)
        inside = q > 0
        g = np.zeros_like(r)
        g1 = np.zeros_like(r)
        g2 = np.zeros_like(r)
        qi = q[inside]
        R2 = self.radius ** 2
        if self.kind == "mollifier":
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                val = np.exp(1.0 - 1.0 / qi)
                g1v = -val / (R2 * qi ** 2)
                g2v = val / (R2 ** 2 * qi ** 4) - 2.0 * val / (R2 ** 2 * qi ** 3)
            # exp(1 - 1/q) underflows before the polynomial factors blow up
            bad = ~np.isfinite(g1v) | ~np.isfinite(g2v) | (val == 0)
            g1v[bad] = 0.0
            g2v[bad] = 0.0
        else:
            p = self.power
            val = qi ** p
            g1v = -p * qi ** (p - 1) / R2
            g2v = p * (p - 1) * qi ** (p - 2) / R2 ** 2
        g[inside], g1[inside], g2[inside] = val, g1v, g2v
        return g, g1, g2

    def profile(self, r):
        return self._g_derivs(r)[0]

    def dprofile(self, r):
        """Radial derivative ``phi'(r) = 2 r g'(r^2)``."""
        r = np.asarray(r, dtype=float)
        return 2.0 * r * self._g_derivs(r)[1]

    def laplacian_radial(self, r):
        r = np.asarray(r, dtype=float)
        _, g1, g2 = self._g_derivs(r)
        return 4.0 * (r * r * g2 + g1)

    def __call__(self, w):
        return self.profile(np.abs(np.asarray(w) - self.center))

    def gradient(self, w):
        """``df/dx + i df/dy`` at ``w``."""
        d = np.asarray(w, dtype=complex) - self.center
        r = np.abs(d)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r > 0, d / np.where(r > 0, r, 1.0), 0.0)
        return self.dprofile(r) * unit

    def laplacian(self, w):
        return self.laplacian_radial(np.abs(np.asarray(w) - self.center))

    def integral(self):
        """``int f(w) dw`` over the plane."""
        val, _ = integrate.quad(lambda r: 2.0 * math.pi * r * float(self.profile(r)),
                                0.0, self.radius, epsabs=1e-14, epsrel=1e-13, limit=200)
        return val

    def laplacian_l1(self):
        """``||Lap f||_1``."""
        val, _ = integrate.quad(lambda r: 2.0 * math.pi * r * abs(float(self.laplacian_radial(r))),
                                0.0, self.radius, epsabs=1e-14, epsrel=1e-12, limit=400)
        return val

    def shifted(self, a):
        """The same bump translated by ``a`` in the local coordinate."""
        return TestFunction(self.kind, self.radius, self.power, self.center + complex(a))


def make_bump(kind="mollifier", radius=3.0, power=None):
    if radius <= 0:
        raise ConfigError(f"bump radius must be positive, got {radius}")
    if kind in ("mollifier", "mollifier_bump"):
        return TestFunction("mollifier", float(radius))
    if kind in ("polynomial", "polynomial_bump"):
        power = 4 if power is None else int(power)
        if power < 4:
            raise ConfigError(f"polynomial bump needs power >= 4 for a continuous Laplacian, got {power}")
        return TestFunction("polynomial", float(radius), power)
    raise ConfigError(f"unknown test function kind {kind!r}")


def _eigs(spectrum):
    return np.asarray(getattr(spectrum, "sigma", spectrum), dtype=complex)


def linear_statistic(spectrum, f, z0):
    r"""``(1/n) sum_i f_{z0}(sigma_i) = sum_i f(sqrt(n)(sigma_i - z0))``."""
    sigma = _eigs(spectrum)
    n = sigma.shape[0]
    return float(np.sum(f(math.sqrt(n) * (sigma - complex(z0)))))


def _arc_fraction(r, d, rho):
    # angular measure of {|w| = r} inside the disk of radius rho centred at distance d
    if d == 0.0:
        return 2.0 * math.pi if r <= rho else 0.0
    if r + d <= rho:
        return 2.0 * math.pi
    if r >= d + rho or d >= r + rho or r == 0.0:
        return 0.0
    c = (r * r + d * d - rho * rho) / (2.0 * r * d)
    return 2.0 * math.acos(min(1.0, max(-1.0, c)))


def deterministic_term(f, z0, n):
    r"""``(1/pi) int_{|z| <= 1} f_{z0}(z) dz``, returned as ``(value, error_estimate)``.

    In the local coordinate this is ``(1/pi)`` times the integral of ``f`` over
    the disk ``|z0 + w/sqrt n| <= 1``; polar coordinates about the bump centre
    reduce it to a 1D integral with kinks only where the circles cross.
    """
    rho = math.sqrt(n)
    c = complex(z0) * rho + f.center  # bump centre, measured from the disk centre
    d = abs(c)
    R = f.radius
    breaks = sorted({x for x in (abs(rho - d), rho + d) if 0.0 < x < R})

    def integrand(r):
        return float(f.profile(r)) * r * _arc_fraction(r, d, rho)

    val, err = integrate.quad(integrand, 0.0, R, points=breaks or None,
                              epsabs=1e-13, epsrel=1e-11, limit=400)
    return val / math.pi, err / math.pi


@dataclass(frozen=True)
class ZGrid:
    """Tensor composite Gauss-Legendre rule on the square support of the bump.

    ``panels * order`` nodes per axis; the error estimate compares against one
    refinement with twice the panels.
    """

    panels: int = 6
    order: int = 8

    def nodes(self, f, panels=None):
        panels = self.panels if panels is None else panels
        R = f.radius
        x, wt = leggauss(self.order)
        edges = np.linspace(-R, R, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wts = (half[:, None] * wt[None, :]).ravel()
        gx, gy = np.meshgrid(pts, pts, indexing="ij")
        w = (gx + 1j * gy).ravel() + f.center
        weights = np.outer(wts, wts).ravel()
        lap = f.laplacian(w)
        keep = lap != 0.0
        return w[keep], weights[keep] * lap[keep]

    def levels(self, f):
        return [self.nodes(f, self.panels), self.nodes(f, 2 * self.panels)]


def _node_singular_values(x, z):
    s = singular_values_batch(x, z)
    small = s.min(axis=1) < _TINY_SINGULAR
    if np.any(small):
        n = s.shape[1]
        idx = np.flatnonzero(small)
        warnings.warn(f"{idx.size} quadrature node(s) hit a singular value below "
                      f"{_TINY_SINGULAR:g}; jittering by 1e-8/sqrt(n)", RuntimeWarning, stacklevel=3)
        z = z.copy()
        z[idx] += 1e-8 / math.sqrt(n) * (1 + 1j) / math.sqrt(2)
        s[idx] = singular_values_batch(x, z[idx])
        if np.any(s[idx].min(axis=1) < _TINY_SINGULAR):
            raise NumericalError(f"singular value below {_TINY_SINGULAR:g} at node z={z[idx][0]}")
    return s


def _with_centre(f, z0, w, n):
    # Append the bump centre as a last node. Integrands are then measured
    # relative to their value there: int Lap f = 0 makes this exact, and it
    # keeps an O(n log|z0|) offset from multiplying the rule's error in int Lap f.
    return complex(z0) + np.append(w, f.center) / math.sqrt(n)


def girko_logdet_rhs(x, f, z0, grid=None):
    r"""``(1/4 pi n) int Lap f_{z0}(z) log|det H^z| dz`` as ``(value, error_estimate)``."""
    x = np.asarray(getattr(x, "entries", x))
    grid = grid or ZGrid()
    n = x.shape[0]
    vals = []
    for w, weights in grid.levels(f):
        s = _node_singular_values(x, _with_centre(f, z0, w, n))
        logdet = 2.0 * np.log(s).sum(axis=1)
        vals.append(float(weights @ (logdet[:-1] - logdet[-1])) / (4.0 * math.pi))
    return vals[1], abs(vals[1] - vals[0])


def _log_sum_squares(a, b):
    # log(a^2 + b^2) without overflow for huge b
    a, b = np.abs(a), np.abs(b)
    big = np.maximum(a, b)
    small = np.minimum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(big > 0, small / np.where(big > 0, big, 1.0), 0.0)
        return 2.0 * np.log(big) + np.log1p(ratio * ratio)


def eta_integral_closed_form(lambdas, eta0, T):
    r"""``int_eta0^T (1/2n) sum_i eta/(lambda_i^2 + eta^2) d eta``

    ``= (1/4n) sum_i log((lambda_i^2 + T^2)/(lambda_i^2 + eta0^2))`` for the ``2n``
    eigenvalues ``lambdas`` (last axis).
    """
    lam = np.asarray(lambdas, dtype=float)
    if not 0.0 <= eta0 < T:
        raise ConfigError(f"need 0 <= eta0 < T, got eta0={eta0}, T={T}")
    lower = _log_sum_squares(lam, eta0)
    if np.any(np.isinf(lower)):
        raise NumericalError("zero eigenvalue with eta0 = 0: the eta-integral diverges")
    two_n = lam.shape[-1]
    return np.sum(_log_sum_squares(lam, T) - lower, axis=-1) / (2.0 * two_n)


def default_eta0(n, delta=0.05):
    return float(n) ** (-0.75 - delta)


def default_T(n):
    return float(n) ** 3


@dataclass(frozen=True)
class GirkoDecomposition:
    n: int
    z0: complex
    lhs: float
    det_term: float
    logdet_rhs: float
    i1: float
    i2: float
    i3: float
    i4: float
    eta0: float
    T: float
    quadrature_error_estimate: float

    @property
    def total(self):
        return self.i1 + self.i2 + self.i3 + self.i4

    @property
    def residual(self):
        """``lhs - det_term - (I1 + I2 + I3 + I4)``."""
        return self.lhs - self.det_term - self.total

    @property
    def scale(self):
        return max(abs(self.lhs), abs(self.det_term), 1e-300)

    @property
    def relative_residual(self):
        return abs(self.residual) / self.scale

    @property
    def girko_relative_residual(self):
        return abs(self.lhs - self.logdet_rhs) / self.scale


def _decomposition_level(x, f, z0, w, weights, eta0, T):
    n = x.shape[0]
    z = _with_centre(f, z0, w, n)
    s = _node_singular_values(x, z)
    s2 = s * s
    logdet = np.log(s2).sum(axis=1)
    # Constant-in-z parts integrate to zero against Lap f and are dropped:
    # 2n log T from I1, n log T from the resolvent part of I3 and
    # n log(1 + T) from its deterministic part.
    log1p_T = np.log1p(s2 / (T * T)).sum(axis=1)
    lam = np.concatenate((-s, s), axis=1)
    g_low = eta_integral_closed_form(lam, 0.0, eta0)
    g_high = 0.5 * (log1p_T - _log_sum_squares(s, eta0).sum(axis=1)) / n
    m_low, e_low = dyson.im_mhat_integral(z, 0.0, eta0)
    m_high, e_high = dyson.im_mhat_integral(z, eta0, T, excess=True)
    tail, e_tail = dyson.tail_integral_grid(z, T)
    c = n / (2.0 * math.pi)

    def integrate_centred(values):
        return float(weights @ (values[:-1] - values[-1]))

    terms = {
        "logdet": integrate_centred(logdet) / (4.0 * math.pi),
        "i1": integrate_centred(log1p_T) / (4.0 * math.pi),
        "i2": -c * integrate_centred(g_low - m_low),
        "i3": -c * integrate_centred(g_high - m_high),
        "i4": c * integrate_centred(tail),
    }
    abs_w = np.abs(weights)
    eta_err = c * float(abs_w @ (e_low + e_high + e_tail)[:-1]
                        + abs_w.sum() * (e_low + e_high + e_tail)[-1])
    return terms, eta_err


def decompose_I(x, f, z0, eta0=None, T=None, delta=0.05, grid=None, spectrum=None):
    """Evaluate both sides of Girko's identity and the four-term split.

    ``x`` is the matrix (array or sample); ``spectrum`` may pass precomputed
    eigenvalues for the left side. Defaults: ``eta0 = n^(-3/4 - delta)``,
    ``T = n^3``.
    """
    from .spectral import complex_eigenvalues

    x = np.asarray(getattr(x, "entries", x))
    n = x.shape[0]
    eta0 = default_eta0(n, delta) if eta0 is None else float(eta0)
    T = default_T(n) if T is None else float(T)
    if not 0.0 < eta0 < T:
        raise ConfigError(f"need 0 < eta0 < T, got eta0={eta0}, T={T}")
    grid = grid or ZGrid()
    sigma = complex_eigenvalues(x) if spectrum is None else spectrum
    lhs = linear_statistic(sigma, f, z0)
    det, det_err = deterministic_term(f, z0, n)
    levels = [_decomposition_level(x, f, z0, w, wt, eta0, T) for w, wt in grid.levels(f)]
    (coarse, _), (fine, eta_err) = levels
    quad_err = sum(abs(fine[k] - coarse[k]) for k in fine) + eta_err + det_err
    return GirkoDecomposition(
        n=n, z0=complex(z0), lhs=lhs, det_term=det, logdet_rhs=fine["logdet"],
        i1=fine["i1"], i2=fine["i2"], i3=fine["i3"], i4=fine["i4"],
        eta0=eta0, T=T, quadrature_error_estimate=quad_err,
    )


DECOMPOSITION_COLUMNS = ("n", "seed", "z0", "eta0", "T", "lhs", "det_term", "logdet_rhs",
                         "i1", "i2", "i3", "i4", "residual", "error_budget")


def decomposition_row(dec, seed):
    return {
        "n": dec.n, "seed": f"{int(seed):x}", "z0": f"{dec.z0.real!r}{dec.z0.imag:+}j",
        "eta0": dec.eta0, "T": dec.T, "lhs": dec.lhs, "det_term": dec.det_term,
        "logdet_rhs": dec.logdet_rhs, "i1": dec.i1, "i2": dec.i2, "i3": dec.i3, "i4": dec.i4,
        "residual": dec.residual, "error_budget": dec.quadrature_error_estimate,
    }


def write_decomposition_csv(path, decs_with_seeds):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=DECOMPOSITION_COLUMNS)
        writer.writeheader()
        for dec, seed in decs_with_seeds:
            writer.writerow(decomposition_row(dec, seed))
