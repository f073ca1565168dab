r"""The scalar self-consistent equation on the imaginary axis.

For ``w = i eta`` the solution of

    -1/m = w + m - |z|^2/(w + m),    Im m > 0,

is purely imaginary, ``m = i y``, and ``y`` is the unique positive root of the
cubic

    g(y) = y ((eta + y)^2 + |z|^2) - (eta + y).

``g(0) = -eta < 0`` and ``g`` has exactly one sign change on ``y > 0``, so a
bracket ``[eta/((eta+1)^2 + |z|^2), min(1, 1/eta)]`` always contains the root.
For large ``eta`` root finding switches to the equivalent
``y = s/(s^2 + |z|^2)``, ``s = eta + y``, which avoids cancellation there. All solvers below broadcast
over arrays of ``z`` and ``eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .errors import ConfigError, NumericalError

__all__ = [
    "DysonSolution", "im_mhat", "solve_mhat", "build_M", "M_norm",
    "mhat_derivative_bound", "mhat_tail_integrand", "mhat_tail_integral",
    "im_mhat_integral", "tail_integral_grid", "dyson_grid",
]

_MAX_ITERS = 200


@dataclass(frozen=True)
class DysonSolution:
    z: complex
    eta: float
    mhat: complex
    u: float
    m_offdiag: complex
    residual: float


def _cubic(y, eta, a):
    # Two forms with the same sign. For eta <= 1 the expanded cubic
    # y s^2 + (a - 1) y - eta has no cancellation even at a = 1; for eta > 1
    # it cancels at O(eta), while g/(s^2 + a) = y - s/(s^2 + a) does not.
    s = eta + y
    small = y * s * s + (a - 1.0) * y - eta
    large = y - s / (s * s + a)
    return np.where(eta <= 1.0, small, large)


def _cubic_prime(y, eta, a):
    s = eta + y
    q = s * s + a
    small = s * s + 2.0 * y * s + (a - 1.0)
    large = 1.0 - (a - s * s) / (q * q)
    return np.where(eta <= 1.0, small, large)


def im_mhat(z, eta):
    """``Im m^z(i eta)`` for broadcastable arrays ``z`` and ``eta > 0``."""
    a = np.abs(np.asarray(z)) ** 2
    eta = np.asarray(eta, dtype=float)
    a, eta = np.broadcast_arrays(a, eta)
    if np.any(~(eta > 0)):
        raise ConfigError("eta must be positive")
    # widened slightly: at |z| = 0 the root sits within eta^-3 of 1/eta
    lo = eta / ((eta + 1.0) ** 2 + a) * (1.0 - 1e-13)
    hi = np.minimum(1.0, 1.0 / eta) * (1.0 + 1e-13)
    if np.any(_cubic(lo, eta, a) > 0) or np.any(_cubic(hi, eta, a) < 0):
        bad = np.flatnonzero((_cubic(lo, eta, a) > 0) | (_cubic(hi, eta, a) < 0))[0]
        raise NumericalError(
            f"bracket failure at |z|^2={a.flat[bad]!r}, eta={eta.flat[bad]!r}")
    # Newton on the bracket, falling back to a geometric bisection step whenever
    # the Newton iterate leaves it; the bracket shrinks every iteration, so this
    # converges unconditionally and keeps relative accuracy when y is tiny
    y = np.sqrt(lo * hi)
    done = np.zeros(y.shape, dtype=bool)
    for _ in range(_MAX_ITERS):
        h = _cubic(y, eta, a)
        neg = h < 0
        lo = np.where(neg, y, lo)
        hi = np.where(neg, hi, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = y - h / _cubic_prime(y, eta, a)
        ok = np.isfinite(cand) & (cand >= lo) & (cand <= hi)
        new = np.where(ok, cand, np.sqrt(lo * hi))
        done |= (np.abs(new - y) <= 2e-15 * y) | (hi - lo <= 1e-14 * y) | (h == 0)
        y = np.where(done, y, new)
        if np.all(done):
            break
    else:
        raise NumericalError("Dyson root iteration did not converge")
    return y


def _residual(z, eta, mhat):
    # the equation multiplied through by m: 1 + m (w + m - |z|^2/(w + m)) = 0
    w = 1j * eta
    return abs(1.0 + mhat * (w + mhat - abs(z) ** 2 / (w + mhat)))


def solve_mhat(z, eta, tol=1e-12):
    """Solve for ``m^z(i eta)`` and package ``u`` and the off-diagonal entry of ``M``."""
    eta = float(eta)
    if not eta > 0:
        raise ConfigError(f"eta must be positive, got {eta}")
    if tol < 1e-14:
        raise ConfigError("tolerance below 1e-14 is not attainable in double precision")
    z = complex(z)
    y = float(im_mhat(z, eta))
    mhat = 1j * y
    res = _residual(z, eta, mhat)
    if res > tol:
        raise NumericalError(f"residual {res:.3e} above tolerance at z={z}, eta={eta}")
    u = y / (eta + y)
    return DysonSolution(z, eta, mhat, u, -z * u, res)


def build_M(sol):
    """2x2 block-scalar form ``[[m, -z u], [-conj(z) u, m]]`` of ``M^z(i eta)``."""
    return np.array([[sol.mhat, -sol.z * sol.u],
                     [-np.conj(sol.z) * sol.u, sol.mhat]], dtype=complex)


def M_norm(z, eta):
    return float(np.linalg.norm(build_M(solve_mhat(z, eta)), 2))


def mhat_derivative_bound(z, eta, rel_step=1e-4):
    """Central-difference estimate of the operator norm of ``dM/dw`` at ``w = i eta``."""
    eta = float(eta)
    if not eta > 0:
        raise ConfigError("eta must be positive")
    h = eta * rel_step
    if h == 0.0 or eta + h == eta:
        raise NumericalError(f"finite-difference step underflows at eta={eta}")
    plus = build_M(solve_mhat(z, eta + h))
    minus = build_M(solve_mhat(z, eta - h))
    # dM/dw = -i dM/deta on the imaginary axis; the norm is unaffected
    return float(np.linalg.norm((plus - minus) / (2.0 * h), 2))


def mhat_tail_integrand(z, eta):
    r"""``Im m(i eta) - 1/(eta + 1)`` without cancellation.

    Using the equation, ``y (eta + 1) - 1 = y (1 - y - |z|^2/(eta + y))``.
    """
    eta = np.asarray(eta, dtype=float)
    y = im_mhat(z, eta)
    a = np.abs(np.asarray(z)) ** 2
    return y * (1.0 - y - a / (eta + y)) / (eta + 1.0)


def mhat_tail_integral(z, T):
    r"""``int_T^inf (Im m(i eta) - 1/(eta+1)) d eta`` and an absolute error estimate.

    The map ``eta = T/v`` sends the half line to ``(0, 1]`` and turns the
    ``eta^-2`` decay of the integrand into a bounded, smooth function of ``v``,
    so no artificial cutoff is needed.
    """
    T = float(T)
    if T < 10:
        raise ConfigError(f"tail integral needs T >= 10, got {T}")
    z = complex(z)

    def f(v):
        eta = T / v
        return float(mhat_tail_integrand(z, eta)) * T / (v * v)

    value, err, info = integrate.quad(f, 0.0, 1.0, epsabs=1e-15, epsrel=1e-12,
                                      limit=200, full_output=True)[:3]
    if err > 1e-8 * max(1.0, abs(value)):
        raise NumericalError(f"tail quadrature did not converge (error {err:.2e})")
    return value, err


def _gauss_panels(lo, hi, panels, order):
    x, w = leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _integrate_levels(z, lo, hi, panels, order, excess=False):
    """Integral of ``Im m`` (or of ``Im m - 1/(1+eta)``) over ``[lo, hi]`` at one resolution."""
    z = np.asarray(z).ravel()
    if lo == 0.0:
        # eta = hi v^3 absorbs the eta^{1/3} cusp at |z| = 1
        v, w = _gauss_panels(0.0, 1.0, panels, order)
        eta = hi * v ** 3
        jac = 3.0 * hi * v ** 2
    else:
        t, w = _gauss_panels(math.log(lo), math.log(hi), panels, order)
        eta = np.exp(t)
        jac = eta
    if excess:
        y = mhat_tail_integrand(z[:, None], eta[None, :])
    else:
        y = im_mhat(z[:, None], eta[None, :])
    return y @ (w * jac)


def im_mhat_integral(z, lo, hi, panels=None, order=8, excess=False):
    r"""``int_lo^hi Im m^z(i eta) d eta`` for an array of ``z``, with error estimate.

    Composite Gauss-Legendre in ``v`` (``eta = hi v^3``) when ``lo = 0`` and in
    ``log eta`` otherwise; the error estimate is the change under doubling the
    number of panels, and the finer value is returned. With ``excess=True``
    the integrand is ``Im m - 1/(1+eta)``, which stays O(1) over long ranges.
    """
    lo, hi = float(lo), float(hi)
    if not 0.0 <= lo < hi:
        raise ConfigError(f"need 0 <= lo < hi, got [{lo}, {hi}]")
    if panels is None:
        panels = 4 if lo == 0.0 else max(2, int(math.ceil(math.log(hi / lo) / 2.0)))
    coarse = _integrate_levels(z, lo, hi, panels, order, excess)
    fine = _integrate_levels(z, lo, hi, 2 * panels, order, excess)
    return fine, np.abs(fine - coarse)


def tail_integral_grid(z, T, order=24):
    """Vectorized ``mhat_tail_integral`` over an array of ``z`` (fixed Gauss rule)."""
    z = np.asarray(z).ravel()
    T = float(T)
    if T < 10:
        raise ConfigError(f"tail integral needs T >= 10, got {T}")
    vals = []
    for k in (order, 2 * order):
        v, w = leggauss(k)
        v = 0.5 * (v + 1.0)
        w = 0.5 * w
        eta = T / v
        f = mhat_tail_integrand(z[:, None], eta[None, :]) * (T / v ** 2)[None, :]
        vals.append(f @ w)
    return vals[1], np.abs(vals[1] - vals[0])


def dyson_grid(zs, etas):
    """Rows ``(z_re, z_im, eta, im_mhat, u, residual)`` over the product grid."""
    rows = []
    for z in np.atleast_1d(zs):
        for eta in np.atleast_1d(etas):
            sol = solve_mhat(z, eta)
            rows.append((sol.z.real, sol.z.imag, sol.eta, sol.mhat.imag, sol.u, sol.residual))
    return rows
