import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from edgelab.ensemble import EnsembleSpec, sample_ginibre
from edgelab.errors import ConfigError, NumericalError
from edgelab.experiments import eigenvalue_pool
from edgelab.girko import (
    ZGrid, decompose_I, default_eta0, default_T, deterministic_term, eta_integral_closed_form,
    girko_logdet_rhs, linear_statistic, make_bump, write_decomposition_csv,
)
from edgelab.kernel import edge_density_profile
from edgelab.spectral import complex_eigenvalues

BUMPS = [make_bump("mollifier", 3.0), make_bump("polynomial", 2.0, 4), make_bump("polynomial", 1.5, 7)]


def disk_integral(fun, R):
    """[DERIVED] plain 2D adaptive quadrature over the disk of radius R."""
    val, _ = integrate.dblquad(lambda y, x: fun(complex(x, y)), -R, R,
                               lambda x: -math.sqrt(max(R * R - x * x, 0.0)),
                               lambda x: math.sqrt(max(R * R - x * x, 0.0)),
                               epsabs=1e-12, epsrel=1e-10)
    return val


def test_mollifier_centre_values():
    f = make_bump()
    assert float(f(0)) == 1.0
    assert float(f.dprofile(0.0)) == 0.0
    assert float(f(3.0)) == 0.0 and float(f(2.0 + 3.0j)) == 0.0


@pytest.mark.parametrize("f", BUMPS, ids=["mollifier", "poly4", "poly7"])
def test_laplacian_matches_five_point_stencil(f):
    rng = np.random.default_rng(0)
    pts = 0.95 * f.radius * np.sqrt(rng.uniform(size=50)) * np.exp(2j * math.pi * rng.uniform(size=50))

    def stencil(h):
        return (f(pts + h) + f(pts - h) + f(pts + 1j * h) + f(pts - 1j * h) - 4 * f(pts)) / h ** 2

    # Richardson step removes the h^2 term; the mollifier's fourth derivatives
    # near r = R are large enough to dominate a plain stencil
    h = 2e-3
    fd = (4 * stencil(h / 2) - stencil(h)) / 3
    assert np.max(np.abs(fd - f.laplacian(pts))) < 1e-6 * max(1.0, np.max(np.abs(fd)))
    out = f.radius * (1.0 + rng.uniform(0, 1, 20)) * np.exp(1j * rng.uniform(0, 6, 20))
    assert np.all(f.laplacian(out) == 0.0) and np.all(f(out) == 0.0)


@pytest.mark.parametrize("f", BUMPS, ids=["mollifier", "poly4", "poly7"])
def test_gradient_matches_central_differences(f):
    h = 1e-6
    w = np.array([0.3 + 0.2j, -0.5j * f.radius, 0.7 * f.radius])
    fd = (f(w + h) - f(w - h)) / (2 * h) + 1j * (f(w + 1j * h) - f(w - 1j * h)) / (2 * h)
    assert np.allclose(f.gradient(w), fd, atol=1e-7)


@pytest.mark.parametrize("f", BUMPS, ids=["mollifier", "poly4", "poly7"])
def test_laplacian_integrates_to_zero(f):
    radial = integrate.quad(lambda r: 2 * math.pi * r * float(f.laplacian_radial(r)),
                            0, 2 * f.radius, points=[f.radius], epsabs=1e-12, limit=400)[0]
    assert abs(radial) <= 1e-8 * f.laplacian_l1()
    assert abs(radial) <= 1e-8


def test_integral_matches_two_dimensional_quadrature():
    f = make_bump("polynomial", 2.0, 4)
    # [DERIVED] int (1 - r^2/R^2)^p dA = pi R^2 / (p + 1)
    assert f.integral() == pytest.approx(math.pi * 4 / 5, rel=1e-12)
    g = make_bump()
    assert g.integral() == pytest.approx(disk_integral(lambda w: float(g(w)), 3.0), rel=1e-8)


@pytest.mark.parametrize("kwargs", [dict(radius=0.0), dict(radius=-1.0),
                                    dict(kind="polynomial", power=3), dict(kind="gaussian")])
def test_make_bump_errors(kwargs):
    with pytest.raises(ConfigError):
        make_bump(**kwargs)


def test_linear_statistic_examples():
    f = make_bump()
    n = 100
    far = np.array([-0.5, 0.2j, 0.5 + 0.5j] + [0.0] * (n - 3))
    assert linear_statistic(far, f, 1.0) == 0.0
    one = np.array([1.0] + [0.0] * (n - 1))
    assert linear_statistic(one, f, 1.0) == 1.0


@given(st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=1.2))
def test_scaling_covariance(a, z0):
    n = 64
    sigma = complex_eigenvalues(sample_ginibre(n, "complex", stream=3).entries)
    f = make_bump()
    # f(. - a) evaluated at sqrt(n)(sigma - z0') equals f at sqrt(n)(sigma - z0) when z0' = z0 - a/sqrt(n)
    lhs = linear_statistic(sigma, f.shifted(a), z0 - a / math.sqrt(n))
    assert lhs == pytest.approx(linear_statistic(sigma, f, z0), abs=1e-12)


def test_deterministic_term_limits():
    f = make_bump()
    inside, err = deterministic_term(f, 0.2, 1024)
    assert inside == pytest.approx(f.integral() / math.pi, rel=1e-12)
    assert err < 1e-10
    assert deterministic_term(f, 1.2, 1024)[0] == 0.0
    # shifted bump: only the centre matters
    g = f.shifted(0.5)
    assert deterministic_term(g, 0.2 - 0.5 / 32, 1024)[0] == pytest.approx(inside, rel=1e-12)


def test_deterministic_term_approaches_the_half_plane_limit():
    """[DERIVED] (1/pi) int over {Re(conj(z0) w) < 0} of f, by 2D adaptive quadrature."""
    f = make_bump()
    z0 = np.exp(0.7j)
    R = f.radius

    # f is radial, so the half plane can be rotated to {Re w < 0}
    limit = integrate.dblquad(lambda y, x: float(f(complex(x, y))), -R, 0.0,
                              lambda x: -math.sqrt(R * R - x * x),
                              lambda x: math.sqrt(R * R - x * x), epsabs=1e-12)[0] / math.pi
    value, _ = deterministic_term(f, z0, 1024)
    assert abs(value - limit) <= 0.02 * limit


def test_girko_identity_at_small_n():
    f = make_bump()
    x = sample_ginibre(16, "complex", stream=0, seed=1).entries
    sigma = complex_eigenvalues(x)
    for z0 in (0.5, 1.0):
        lhs = linear_statistic(sigma, f, z0)
        assert lhs > 1.0
        for grid in (ZGrid(), ZGrid(panels=12)):
            rhs, err = girko_logdet_rhs(x, f, z0, grid)
            assert abs(rhs - lhs) <= err


def test_girko_identity_vanishes_away_from_the_spectrum():
    f = make_bump()
    x = sample_ginibre(16, "complex", stream=0, seed=1).entries
    assert linear_statistic(complex_eigenvalues(x), f, 3.0) == 0.0
    rhs, _ = girko_logdet_rhs(x, f, 3.0, ZGrid(panels=12))
    assert abs(rhs) <= 1e-6


def test_grid_doubling_shrinks_the_error_in_the_smooth_regime():
    f = make_bump()
    x = sample_ginibre(16, "complex", stream=0, seed=1).entries
    errs = [abs(girko_logdet_rhs(x, f, 3.0, ZGrid(panels=p))[0]) for p in (6, 12, 24)]
    assert errs[1] * 4 <= errs[0] and errs[2] * 4 <= errs[1]


def test_tiny_singular_value_triggers_jitter():
    f = make_bump()
    # an eigenvalue exactly at the bump centre, which is always a node
    x = np.diag([-0.5, 0.0, 0.25, 0.5]).astype(complex)
    with pytest.warns(RuntimeWarning, match="jitter"):
        rhs, _ = girko_logdet_rhs(x, f, 0.0, ZGrid(panels=3, order=5))
    assert math.isfinite(rhs)


def test_eta_integral_zero_eigenvalue():
    lam = np.array([0.0, 0.0])  # n = 1
    val = eta_integral_closed_form(lam, 1e-3, 10.0)
    # (1/4n) sum over 2n copies of 2 log(T/eta0)
    assert val == pytest.approx(math.log(10.0 / 1e-3), rel=1e-14)
    with pytest.raises(NumericalError):
        eta_integral_closed_form(lam, 0.0, 10.0)
    with pytest.raises(ConfigError):
        eta_integral_closed_form(lam, 1.0, 1.0)


@given(st.integers(0, 10 ** 6), st.floats(1e-6, 1e-1), st.floats(1.0, 1e6))
def test_eta_integral_matches_adaptive_quadrature(seed, eta0, T):
    """[DERIVED] scipy.quad of (1/2n) sum eta/(lambda^2 + eta^2) in log eta."""
    s = np.abs(np.random.default_rng(seed).standard_normal(3)) * 10.0 ** np.random.default_rng(seed).uniform(-4, 1, 3)
    lam = np.concatenate((-s, s))

    def integrand(t):
        eta = math.exp(t)
        return float(np.mean(eta / (lam ** 2 + eta ** 2))) * eta

    brk = sorted(math.log(v) for v in s if eta0 < v < T)
    oracle = integrate.quad(integrand, math.log(eta0), math.log(T), points=brk or None,
                            epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    assert eta_integral_closed_form(lam, eta0, T) == pytest.approx(oracle, rel=1e-10, abs=1e-12)


@given(st.floats(1e-6, 1.0), st.floats(2.0, 1e300))
def test_eta_integral_is_increasing_in_T(eta0, T):
    lam = np.array([-0.3, -1e-5, 1e-5, 0.3])
    a = eta_integral_closed_form(lam, eta0, T)
    b = eta_integral_closed_form(lam, eta0, 2 * T)
    assert math.isfinite(b) and b > a


def test_defaults():
    assert default_eta0(64) == pytest.approx(64 ** -0.8)
    assert default_T(64) == 64.0 ** 3


@pytest.fixture(scope="module")
def decomposition():
    x = sample_ginibre(64, "complex", stream=0, seed=1)
    return decompose_I(x, make_bump(), 1.0)


def test_decomposition_identity(decomposition):
    dec = decomposition
    assert dec.relative_residual <= 1e-3
    assert dec.girko_relative_residual <= 1e-3
    assert abs(dec.residual) <= dec.quadrature_error_estimate
    assert dec.T == 64.0 ** 3 and dec.eta0 == pytest.approx(64 ** -0.8)


def test_decomposition_boundary_terms_are_small(decomposition):
    dec, n = decomposition, 64
    l1 = make_bump().laplacian_l1()
    assert abs(dec.i1) <= n ** 1.1 * l1 / dec.T ** 2
    assert abs(dec.i4) <= n * l1 / dec.T


def test_decomposition_rejects_bad_cutoffs():
    x = sample_ginibre(8, "complex", stream=0).entries
    with pytest.raises(ConfigError):
        decompose_I(x, make_bump(), 1.0, eta0=1.0, T=0.5)


def test_decomposition_csv(tmp_path, decomposition):
    path = tmp_path / "dec.csv"
    write_decomposition_csv(path, [(decomposition, 255)])
    rows = list(csv.DictReader(open(path)))
    assert rows[0]["seed"] == "ff" and rows[0]["n"] == "64"
    assert float(rows[0]["lhs"]) == decomposition.lhs


def test_linear_statistic_mean_matches_the_edge_kernel():
    """[DERIVED] int f(w) rho_edge(Re w) dw with the complex Ginibre edge profile."""
    n, samples = 256, 500
    f = make_bump()
    spectra = eigenvalue_pool(EnsembleSpec(n, "complex", "gaussian", seed=0), range(samples))
    vals = np.array([linear_statistic(s, f, 1.0) for s in spectra])
    R = f.radius
    predicted = integrate.dblquad(
        lambda y, x: float(f(complex(x, y))) * float(edge_density_profile(x, 0.5)),
        -R, R, lambda x: -math.sqrt(R * R - x * x), lambda x: math.sqrt(R * R - x * x),
        epsabs=1e-10)[0]
    sem = vals.std(ddof=1) / math.sqrt(samples)
    assert abs(vals.mean() - predicted) <= 3 * sem
