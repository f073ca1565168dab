import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from edgelab import kernel
from edgelab.errors import ConfigError, NumericalError
from edgelab.kernel import (
    KernelParams, calibrate_erf_scale, cerf, edge_density_profile, ginibre_kernel,
    kpoint_prediction, profile_table,
)


def quad_erf(w):
    """[DERIVED] (2/sqrt pi) int_0^1 w exp(-(t w)^2) dt by 30-digit quadrature."""
    with mpmath.workdps(30):
        w = mpmath.mpc(w)
        val = 2 / mpmath.sqrt(mpmath.pi) * mpmath.quad(lambda t: w * mpmath.exp(-(t * w) ** 2), [0, 0.5, 1])
        return complex(val)


def oracle_grid(count=200):
    rng = np.random.default_rng(2024)
    r = 3.0 * np.sqrt(rng.uniform(size=count - 20))
    pts = r * np.exp(2j * math.pi * rng.uniform(size=count - 20))
    return np.concatenate((pts, np.linspace(-3, 3, 10), 1j * np.linspace(-3, 3, 10)))


def test_cerf_examples():
    assert cerf(0.0) == 0.0
    assert abs(cerf(1.0) - 0.8427007929497149) < 1e-15
    assert quad_erf(1.0).real == pytest.approx(0.8427007929497149, abs=1e-16)


def test_cerf_matches_quadrature_oracle():
    w = oracle_grid()
    oracle = np.array([quad_erf(v) for v in w])
    assert np.max(np.abs(cerf(w) - oracle)) <= 1e-12


@given(st.complex_numbers(max_magnitude=12))
def test_cerf_agrees_with_faddeeva(w):
    """[DERIVED] erf w = 1 - exp(-w^2) wofz(i w) (scipy), far from overflow."""
    if abs(w.real * w.real - w.imag * w.imag) > 600:
        return
    ref = 1 - np.exp(-w * w) * special.wofz(1j * w)
    scale = max(1.0, abs(ref))
    assert abs(cerf(w) - ref) <= 1e-11 * scale


@given(st.complex_numbers(max_magnitude=12))
def test_cerf_symmetries(w):
    a = cerf(w)
    assert abs(cerf(-w) + a) <= 1e-14 * max(1.0, abs(a))
    assert abs(cerf(np.conj(w)) - np.conj(a)) <= 1e-14 * max(1.0, abs(a))


def test_cerf_real_axis_and_saturation():
    x = np.linspace(-12, 12, 401)
    assert np.max(np.abs(cerf(x).real - special.erf(x))) < 1e-15
    assert cerf(20.0) == 1.0 and cerf(-15.0) == -1.0
    with pytest.warns(RuntimeWarning, match="saturated"):
        assert cerf(20.0 + 1j) == 1.0


def test_kernel_cases():
    w1, w2 = 0.3 - 0.2j, -1.1 + 0.4j
    assert ginibre_kernel(KernelParams(1, 1j), w1, w2) == 0
    assert ginibre_kernel(KernelParams(2.0, 2.0), w1, w2) == 0
    assert ginibre_kernel(KernelParams(0.5, 0.5), w1, w1) == pytest.approx(1 / math.pi)
    assert ginibre_kernel(KernelParams(1.0, 1.0), 0, 0) == pytest.approx(1 / (2 * math.pi))
    z = np.exp(0.4j)
    assert ginibre_kernel(KernelParams(z, z * (1 + 1e-13)), 0, 0) == pytest.approx(1 / (2 * math.pi))


@given(st.sampled_from([0.3, 1.0, 1j, np.exp(2.1j)]), st.complex_numbers(max_magnitude=4),
       st.complex_numbers(max_magnitude=4), st.sampled_from([0.5, 1.0]))
def test_kernel_is_hermitian(z, w1, w2, s):
    p = KernelParams(z, z, s)
    assert ginibre_kernel(p, w1, w2) == pytest.approx(np.conj(ginibre_kernel(p, w2, w1)), abs=1e-13)


@given(st.floats(0, 2 * math.pi), st.complex_numbers(max_magnitude=5), st.sampled_from([0.5, 1.0]))
def test_edge_diagonal_depends_only_on_the_normal_coordinate(theta, w, s):
    z = np.exp(1j * theta)
    diag = ginibre_kernel(KernelParams(z, z, s), w, w)
    xi = (np.conj(z) * w).real
    assert diag.real == pytest.approx(edge_density_profile(xi, s), abs=1e-13)
    assert abs(diag.imag) < 1e-13
    rot = ginibre_kernel(KernelParams(1.0, 1.0, s), np.conj(z) * w, np.conj(z) * w)
    assert rot == pytest.approx(diag, abs=1e-13)


def test_kpoint_examples():
    w = 0.4 - 0.7j
    assert kpoint_prediction([1j], [w], 0.5) == pytest.approx(ginibre_kernel(KernelParams(1j, 1j, 0.5), w, w).real)
    assert kpoint_prediction([1, 1], [w, w]) == pytest.approx(0.0, abs=1e-15)
    far = [kpoint_prediction([1, 1], [0.1, x], 0.5) for x in (2.0, 4.0, 8.0)]
    assert far[0] > far[1] > far[2] and far[2] < 1e-12
    # bulk pair at distance d: (1/pi^2)(1 - exp(-d^2))
    assert kpoint_prediction([0, 0], [0, 1.0]) == pytest.approx((1 - math.exp(-1)) / math.pi ** 2)


@given(st.lists(st.complex_numbers(max_magnitude=3), min_size=1, max_size=6),
       st.sampled_from([0.0, 0.5, 1.0, 1j]))
def test_kpoint_is_nonnegative(ws, z):
    assert kpoint_prediction([z] * len(ws), ws, 0.5) >= 0.0


def test_kpoint_errors(monkeypatch):
    with pytest.raises(ConfigError):
        kpoint_prediction([0] * 7, [0] * 7)
    with pytest.raises(ConfigError):
        kpoint_prediction([0, 0], [0])
    monkeypatch.setattr(kernel, "ginibre_kernel",
                        lambda p, w1, w2: 1.0 if w1 == w2 else 2.0)
    with pytest.raises(NumericalError, match="erf_scale"):
        kpoint_prediction([0, 0], [0, 1])


def test_edge_profile_limits():
    assert edge_density_profile(0.0) == pytest.approx(1 / (2 * math.pi))
    assert abs(edge_density_profile(-10.0) - 1 / math.pi) <= 1e-12
    assert 0.0 <= edge_density_profile(10.0) <= 1e-12
    profile = edge_density_profile(np.linspace(-5, 5, 101), 0.5)
    assert np.all(np.diff(profile) <= 0) and np.all(np.diff(profile[30:71]) < 0)


@pytest.mark.parametrize("s", [0.5, 1.0])
def test_excess_charge_is_finite(s):
    # int (rho - (1/pi) 1{xi < 0}) d xi: odd symmetry about xi = 0 makes it vanish
    f = lambda x: edge_density_profile(x, s) - (1 / math.pi if x < 0 else 0.0)
    val = sum(integrate.quad(f, a, b, epsabs=1e-14)[0] for a, b in ((-40, 0), (0, 40)))
    assert math.isfinite(val) and abs(val) < 1e-12


def test_calibration_recovers_the_generating_scale():
    xi = np.linspace(-4, 4, 81)
    for s in (0.5, 1.0):
        best, dist = calibrate_erf_scale(xi, edge_density_profile(xi, s) + 1e-4 * np.sin(xi))
        assert best == s and dist[s] < 2e-4
    with pytest.raises(ConfigError):
        calibrate_erf_scale(xi, xi[:-1])


def test_profile_table():
    rows = profile_table(np.array([-1.0, 0.0]), 0.5)
    assert rows[1] == (0.0, pytest.approx(1 / (2 * math.pi)))
