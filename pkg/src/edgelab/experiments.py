r"""Monte Carlo experiments: local law, edge density, edge universality,
smallest singular values and the Ornstein-Uhlenbeck flow.

Every ``run_*`` function is a pure function of its configuration (which
carries the seed): the same configuration yields the same tables bit for bit,
whatever the worker count. Matrices are addressed by ``(spec, stream)``;
eigenvalues are cached per process under that key, so experiments sharing a
seed reuse each other's spectra.
"""

from __future__ import annotations

import dataclasses
import functools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dyson, girko, kernel
from .ensemble import EnsembleSpec, flow_point, interpolate_ou, sample_iid, theoretical_cumulant
from .errors import ConfigError
from .spectral import (complex_eigenvalues, resolvent_quadratic_form, resolvent_trace,
                       singular_values)
from .stats import MCAccumulator, fit_power_law, jackknife, ks_two_sample

__all__ = [
    "Table", "Report", "eigenvalues", "eigenvalue_pool", "kpoint_functional",
    "edge_histogram", "LocalLawConfig", "EdgeDensityConfig", "UniversalityConfig",
    "SVTailConfig", "FlowConfig", "GirkoConfig", "run_girko", "run_local_law", "run_edge_density",
    "run_universality", "run_sv_tail", "run_flow", "EXPERIMENTS",
]


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: list


@dataclass
class Report:
    experiment: str
    config: object
    summary: dict
    tables: dict
    wall_time: float = 0.0


def _map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@functools.lru_cache(maxsize=16384)
def eigenvalues(spec, stream):
    """Eigenvalues of ``sample_iid(spec, stream)``, cached and read-only."""
    sigma = complex_eigenvalues(sample_iid(spec, stream)).sigma
    sigma.setflags(write=False)
    return sigma


def eigenvalue_pool(spec, streams, workers=1):
    return _map(lambda s: eigenvalues(spec, s), streams, workers)


def kpoint_functional(spectra, F, z0s):
    r"""Estimate ``int F(w) rho_k(w) dw`` from eigenvalue samples.

    ``rho_k`` is the correlation function of the point process
    ``w_i = sqrt(n)(sigma_i - z0)`` in the local coordinates around
    ``z0s = (z_1, ..., z_k)``: the sample mean of ``sum F(w_{i_1}, ..., w_{i_k})``
    over ordered tuples of distinct indices. ``F`` takes ``k`` arrays and
    broadcasts. Returns ``(rho_estimate, binomial_estimate, sem)``, where the
    binomial form is normalised by ``n^k / binom(n, k)``: it converges to
    ``k!`` times the determinantal limit and agrees with it at ``k = 1``.
    """
    z0s = [complex(z) for z in z0s]
    k = len(z0s)
    if not 1 <= k <= 2:
        raise ConfigError("k-point functionals are implemented for k = 1, 2")
    values = []
    n = None
    for sigma in spectra:
        sigma = np.asarray(getattr(sigma, "sigma", sigma))
        n = sigma.size
        w = [math.sqrt(n) * (sigma - z) for z in z0s]
        if k == 1:
            values.append(float(np.sum(F(w[0]).real)))
        else:
            grid = F(w[0][:, None], w[1][None, :]).real
            values.append(float(grid.sum() - np.trace(grid)))
    values = np.asarray(values)
    mean = float(values.mean())
    sem = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    const = math.factorial(k) * n ** k * math.factorial(n - k) / math.factorial(n)
    return mean, const * mean, sem


def edge_histogram(spectra, n, edges, window=(0.0, 2.0 * math.pi)):
    r"""Density per unit local area of ``xi = sqrt(n)(|sigma| - 1)``.

    Counts in each ``xi`` bin and angular window are divided by the number of
    samples and by the area of the corresponding annular sector in the local
    coordinate ``w = sqrt(n) z``. Returns ``(density, counts)``.
    """
    edges = np.asarray(edges, dtype=float)
    a0, a1 = window
    span = a1 - a0
    if not 0 < span <= 2 * math.pi + 1e-12:
        raise ConfigError("angular window must have positive length at most 2 pi")
    counts = np.zeros(edges.size - 1, dtype=np.int64)
    samples = 0
    for sigma in spectra:
        samples += 1
        sigma = np.asarray(sigma)
        if span < 2 * math.pi:
            ang = np.mod(np.angle(sigma) - a0, 2 * math.pi)
            sigma = sigma[ang < span]
        xi = math.sqrt(n) * (np.abs(sigma) - 1.0)
        counts += np.histogram(xi, edges)[0]
    if counts.sum() == 0:
        raise ConfigError("edge histogram is empty; widen the window or the xi range")
    r = 1.0 + edges / math.sqrt(n)
    area = 0.5 * span * n * np.diff(np.clip(r, 0.0, None) ** 2)
    return counts / (samples * area), counts


# ---------------------------------------------------------------------------
# local law


@dataclass(frozen=True)
class LocalLawConfig:
    ns: tuple = (64, 128, 256, 512)
    samples: int = 100
    zs: tuple = (1 + 0j, 1j, -1 + 0j, -1j)
    eta_exponents: tuple = (0.0, -0.75)
    distribution: str = "gaussian"
    field: str = "complex"
    seed: int = 0
    workers: int = 1


def _local_law_sample(args):
    spec, stream, zs, etas = args
    x = sample_iid(spec, stream)
    n = spec.n
    ones_plus = np.concatenate((np.ones(n), np.zeros(n)))
    ones_minus = np.concatenate((np.zeros(n), np.ones(n)))
    out = []
    for z in zs:
        hs = singular_values(x, z)
        for eta in etas:
            sol = dyson.solve_mhat(z, eta)
            rv = hs.at(eta)
            avg = abs(resolvent_trace(rv) - sol.mhat)
            e1 = np.zeros(2 * n)
            e1[0] = 1.0
            iso = abs(resolvent_quadratic_form(rv, e1, e1) - sol.mhat)
            # <1_+, M 1_-> = -z u n, normalised by |1_+||1_-| = n
            pm = abs(resolvent_quadratic_form(rv, ones_plus, ones_minus) / n - sol.m_offdiag)
            out.append((avg, iso, pm))
    return out


def run_local_law(cfg=LocalLawConfig()):
    """Median and 90th percentile of local-law errors per ``(n, eta, z)``.

    Rows with ``z = all`` pool every ``z`` (identically distributed for
    rotation-invariant ensembles when all ``|z|`` agree); the fitted ``log n``
    slopes in the summary use the pooled medians.
    """
    t0 = time.perf_counter()
    rows = []
    pooled = {}
    for n in cfg.ns:
        spec = EnsembleSpec(n, cfg.field, cfg.distribution, cfg.seed)
        etas = [float(n) ** e for e in cfg.eta_exponents]
        per = _map(_local_law_sample, [(spec, s, cfg.zs, etas) for s in range(cfg.samples)], cfg.workers)
        arr = np.asarray(per).reshape(cfg.samples, len(cfg.zs), len(etas), 3)
        for ie, (e, eta) in enumerate(zip(cfg.eta_exponents, etas)):
            for iz, z in enumerate(cfg.zs):
                col = arr[:, iz, ie, :]
                rows.append((n, e, eta, _fmt_complex(z), *np.median(col, axis=0).tolist(),
                             *np.quantile(col, 0.9, axis=0).tolist()))
            col = arr[:, :, ie, :].reshape(-1, 3)
            med = np.median(col, axis=0)
            rows.append((n, e, eta, "all", *med.tolist(), *np.quantile(col, 0.9, axis=0).tolist()))
            pooled.setdefault(e, []).append(med)
    summary = {}
    for e, meds in pooled.items():
        meds = np.asarray(meds)
        for j, name in enumerate(("averaged", "isotropic_e1", "isotropic_pm")):
            fit = fit_power_law(cfg.ns, meds[:, j])
            summary[f"slope_{name}_eta_exp_{e:g}"] = fit.slope
            summary[f"slope_{name}_eta_exp_{e:g}_stderr"] = fit.stderr_slope
    table = Table(("n", "eta_exponent", "eta", "z", "avg_median", "iso_e1_median", "iso_pm_median",
                   "avg_p90", "iso_e1_p90", "iso_pm_p90"), rows)
    return Report("local-law", cfg, summary, {"local_law": table}, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# edge density


@dataclass(frozen=True)
class EdgeDensityConfig:
    n: int = 512
    samples: int = 200
    distributions: tuple = ("gaussian", "uniform")
    field: str = "complex"
    xi_max: float = 5.0
    bin_width: float = 0.25
    window: tuple = (0.0, 2.0 * math.pi)
    plateau: tuple = (-5.0, -3.0)
    candidates: tuple = (0.5, 1.0)
    seed: int = 0
    workers: int = 1


def _xi_edges(xi_max, width):
    m = int(round(xi_max / width))
    centres = width * np.arange(-m, m + 1)
    return np.concatenate((centres - width / 2, [centres[-1] + width / 2])), centres


def run_edge_density(cfg=EdgeDensityConfig()):
    t0 = time.perf_counter()
    if cfg.distributions[0] != "gaussian":
        raise ConfigError("the first edge-density ensemble must be the Ginibre baseline")
    edges, centres = _xi_edges(cfg.xi_max, cfg.bin_width)
    dens = {}
    counts = {}
    for dist in cfg.distributions:
        spec = EnsembleSpec(cfg.n, cfg.field, dist, cfg.seed)
        pool = eigenvalue_pool(spec, range(cfg.samples), cfg.workers)
        dens[dist], counts[dist] = edge_histogram(pool, cfg.n, edges, cfg.window)
    base = dens["gaussian"]
    best, dist_by_scale = kernel.calibrate_erf_scale(centres, base, cfg.candidates)
    plateau = (centres >= cfg.plateau[0]) & (centres <= cfg.plateau[1])
    at_zero = int(np.argmin(np.abs(centres)))
    summary = {"erf_scale": best,
               "calibration_sup_distance": {f"{k:g}": v for k, v in dist_by_scale.items()}}
    calibrated = kernel.edge_density_profile(centres, best)
    baseline = float(np.max(np.abs(base - calibrated)))
    for dist in cfg.distributions:
        sup = float(np.max(np.abs(dens[dist] - calibrated)))
        summary[dist] = {
            "plateau": float(np.mean(dens[dist][plateau])),
            "at_zero": float(dens[dist][at_zero]),
            "sup_distance_calibrated": sup,
            "ratio_to_baseline": sup / baseline,
            "eigenvalues_in_range": int(counts[dist].sum()),
        }
    cols = ["xi"] + [f"density_{d}" for d in cfg.distributions] + \
        [f"count_{d}" for d in cfg.distributions] + [f"profile_{s:g}" for s in cfg.candidates]
    profiles = [kernel.edge_density_profile(centres, s) for s in cfg.candidates]
    rows = []
    for i, xi in enumerate(centres):
        rows.append((float(xi), *[float(dens[d][i]) for d in cfg.distributions],
                     *[int(counts[d][i]) for d in cfg.distributions],
                     *[float(p[i]) for p in profiles]))
    return Report("edge-density", cfg, summary, {"edge_density": Table(tuple(cols), rows)},
                  time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# universality of linear statistics


@dataclass(frozen=True)
class UniversalityConfig:
    n: int = 512
    samples: int = 400
    distribution: str = "uniform"
    field: str = "complex"
    ks: tuple = (1, 2)
    bump: str = "mollifier"
    radius: float = 3.0
    windows: int = 20
    null_pools: int = 4
    null_pairs: int = 5
    alpha: float = 0.01
    negative_control: bool = True
    seed: int = 0
    workers: int = 1


def _window_points(windows):
    return [complex(math.cos(2 * math.pi * j / windows), math.sin(2 * math.pi * j / windows))
            for j in range(windows)]


def _centred_statistics(pool, f, z0s, n):
    """Matrix ``L[s, j] = linear_statistic - deterministic_term`` at each ``z0_j``."""
    det = np.array([girko.deterministic_term(f, z, n)[0] for z in z0s])
    lin = np.array([[girko.linear_statistic(sigma, f, z) for z in z0s] for sigma in pool])
    return lin - det[None, :]


def _k_statistics(L, k):
    if k == 1:
        return L
    # products at neighbouring windows, far apart on the local scale
    return L * np.roll(L, -1, axis=1)


def run_universality(cfg=UniversalityConfig()):
    t0 = time.perf_counter()
    n = cfg.n
    f = girko.make_bump(cfg.bump, cfg.radius)
    if 2 * cfg.radius * cfg.windows > 2 * math.pi * math.sqrt(n) * 0.95:
        raise ConfigError("angular windows overlap at this n and bump radius")
    z0s = _window_points(cfg.windows)
    gin = EnsembleSpec(n, cfg.field, "gaussian", cfg.seed)
    alt = EnsembleSpec(n, cfg.field, cfg.distribution, cfg.seed)
    pools = [eigenvalue_pool(gin, range(p * cfg.samples, (p + 1) * cfg.samples), cfg.workers)
             for p in range(cfg.null_pools)]
    alt_pool = eigenvalue_pool(alt, range(cfg.samples), cfg.workers)
    L_gin = [_centred_statistics(p, f, z0s, n) for p in pools]
    L_alt = _centred_statistics(alt_pool, f, z0s, n)

    rows = []
    summary = {}
    for k in cfg.ks:
        a_stats = _k_statistics(L_alt, k)
        b_stats = _k_statistics(L_gin[0], k)
        passes = 0
        for j in range(cfg.windows):
            a, b = np.sort(a_stats[:, j]), np.sort(b_stats[:, j])
            res = ks_two_sample(a, b)
            diff = float(a.mean() - b.mean())
            err = math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
            passes += not res.rejects(cfg.alpha)
            rows.append(("universality", k, j, f"{cfg.distribution}-vs-gaussian",
                         res.statistic, res.p_value, diff, err))
        summary[f"k{k}_fail_to_reject_fraction"] = passes / cfg.windows

    pairs = [(0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2)][:cfg.null_pairs]
    if any(max(p) >= cfg.null_pools for p in pairs):
        raise ConfigError("null_pairs needs more null pools")
    rejections = 0
    trials = 0
    for p, q in pairs:
        for j in range(cfg.windows):
            a, b = np.sort(L_gin[p][:, j]), np.sort(L_gin[q][:, j])
            res = ks_two_sample(a, b)
            rejections += res.rejects(cfg.alpha)
            trials += 1
            rows.append(("null", 1, j, f"pool{p}-vs-pool{q}", res.statistic, res.p_value,
                         float(a.mean() - b.mean()),
                         math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)))
    summary["null_rejections"] = rejections
    summary["null_trials"] = trials

    if cfg.negative_control:
        # uncentred: the control checks that the test sees the density drop
        # at the edge, which centring by the circular law removes by design
        edge = [girko.linear_statistic(sigma, f, z0s[0]) for sigma in pools[0]]
        bulk = [girko.linear_statistic(sigma, f, 0j) for sigma in pools[0]]
        a, b = np.sort(edge), np.sort(bulk)
        res = ks_two_sample(a, b)
        summary["negative_control_p_value"] = res.p_value
        summary["negative_control_rejects"] = bool(res.rejects(cfg.alpha))
        rows.append(("negative-control", 1, 0, "edge-vs-bulk", res.statistic, res.p_value,
                     float(a.mean() - b.mean()),
                     math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)))
    table = Table(("test", "k", "window", "comparison", "ks_statistic", "p_value",
                   "mean_difference", "mean_difference_sem"), rows)
    return Report("universality", cfg, summary, {"universality": table}, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# smallest singular values


@dataclass(frozen=True)
class SVTailConfig:
    n: int = 256
    samples: int = 5000
    distribution: str = "gaussian"
    field: str = "complex"
    z: complex = 1 + 0j
    fit_window: tuple = (0.01, 0.3)
    fit_points: int = 12
    count_eta_exponents: tuple = (-1.0, -0.95, -0.9, -0.85, -0.8, -0.75)
    check_eta_exponent: float = -0.8
    force: bool = False
    seed: int = 0
    workers: int = 1


def small_eigenvalue_reference(n, eta, field):
    """Shape of the expected count of ``|lambda_i^z| <= eta`` for ``|z| = 1``."""
    if field == "complex":
        return n ** 1.5 * eta ** 2 * (1.0 + abs(math.log(n * eta ** (4.0 / 3.0))))
    return n ** 0.75 * eta


def _sv_sample(args):
    spec, stream, z = args
    return singular_values(sample_iid(spec, stream), z, factors=False).s


def run_sv_tail(cfg=SVTailConfig()):
    t0 = time.perf_counter()
    spec = EnsembleSpec(cfg.n, cfg.field, cfg.distribution, cfg.seed)
    if spec.no_density and not cfg.force:
        raise ConfigError(f"{cfg.distribution} has no density; tiny singular values are "
                          "possible. Set force=true to run anyway")
    svals = np.asarray(_map(_sv_sample, [(spec, s, cfg.z) for s in range(cfg.samples)], cfg.workers))
    n = cfg.n
    x = np.sort(n ** 1.5 * svals[:, -1] ** 2)
    grid = np.geomspace(cfg.fit_window[0], cfg.fit_window[1], cfg.fit_points)
    cdf = np.searchsorted(x, grid, side="right") / x.size
    if np.any(cdf == 0):
        raise ConfigError("empirical CDF vanishes inside the fit window; increase samples")
    fit = fit_power_law(grid, cdf)
    rows_cdf = [(float(s), float(c)) for s, c in zip(grid, cdf)]
    rows_count = []
    for e in cfg.count_eta_exponents:
        eta = float(n) ** e
        # eigenvalues of H^z come in pairs +-s_j
        counts = 2 * np.sum(svals <= eta, axis=1)
        acc = MCAccumulator().add(counts)
        ref = small_eigenvalue_reference(n, eta, cfg.field)
        rows_count.append((e, eta, acc.mean, acc.sem, ref))
    eta = float(n) ** cfg.check_eta_exponent
    counts = 2 * np.sum(svals <= eta, axis=1)
    ref = small_eigenvalue_reference(n, eta, cfg.field)
    summary = {
        "cdf_exponent": fit.slope, "cdf_exponent_stderr": fit.stderr_slope,
        "count_at_check_eta": float(counts.mean()), "reference_at_check_eta": ref,
        "count_ratio": float(counts.mean()) / ref,
    }
    tables = {
        "sv_tail_cdf": Table(("s", "cdf"), rows_cdf),
        "small_eigenvalue_count": Table(("eta_exponent", "eta", "mean_count", "sem", "reference_shape"),
                                        rows_count),
        "smallest_singular_value": Table(("stream", "x"), [
            (i, float(n ** 1.5 * s ** 2)) for i, s in enumerate(svals[:, -1])]),
    }
    return Report("sv-tail", cfg, summary, tables, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck flow


@dataclass(frozen=True)
class FlowConfig:
    n: int = 128
    samples: int = 2000
    distribution: str = "exponential"
    field: str = "real"
    t_grid: tuple = (0.0, 0.5, 1.0, 2.0, math.inf)
    z: complex = 1 + 0j
    eta_exponent: float = -0.75
    batches: int = 100
    seed: int = 0
    workers: int = 1


def _flow_sample(args):
    spec, stream, t_grid, z, eta = args
    moments = []
    traces = []
    for t in t_grid:
        xt = interpolate_ou(flow_point(spec, stream, t)).entries
        chi = math.sqrt(spec.n) * xt.ravel()
        moments.append([np.mean(chi), np.mean(chi ** 2), np.mean(chi ** 3)])
        s = singular_values(xt, z, factors=False).s
        traces.append(float(np.mean(eta / (s * s + eta * eta))))
    return np.asarray(moments, dtype=complex), np.asarray(traces)


def _kappa3(m):
    m1, m2, m3 = m[..., 0], m[..., 1], m[..., 2]
    return m3 - 3 * m2 * m1 + 2 * m1 ** 3


def run_flow(cfg=FlowConfig()):
    t0 = time.perf_counter()
    spec = EnsembleSpec(cfg.n, cfg.field, cfg.distribution, cfg.seed)
    if spec.distribution == "gaussian":
        raise ConfigError("the flow experiment needs a non-Gaussian base ensemble")
    if 0.0 not in cfg.t_grid or math.inf not in cfg.t_grid:
        raise ConfigError("t_grid must contain 0 and inf")
    eta = float(cfg.n) ** cfg.eta_exponent
    out = _map(_flow_sample, [(spec, s, cfg.t_grid, cfg.z, eta) for s in range(cfg.samples)],
               cfg.workers)
    moments = np.stack([o[0] for o in out])  # (samples, t, 3)
    traces = np.stack([o[1] for o in out])   # (samples, t)
    i0 = cfg.t_grid.index(0.0)
    iinf = cfg.t_grid.index(math.inf)
    k0 = theoretical_cumulant(cfg.distribution, cfg.field, 3, 0, 0.0)

    rows = []
    summary = {"eta": eta}
    for it, t in enumerate(cfg.t_grid):
        kap, kap_se = jackknife(moments[:, it, :], lambda m: _kappa3(m.mean(axis=0)), cfg.batches)
        if it == i0:
            ratio, ratio_se = 1.0, 0.0
        else:
            ratio, ratio_se = jackknife(
                moments, lambda m: (_kappa3(m[:, it].mean(axis=0)) / _kappa3(m[:, i0].mean(axis=0))).real,
                cfg.batches)
        theory = theoretical_cumulant(cfg.distribution, cfg.field, 3, 0, t)
        acc = MCAccumulator().add(traces[:, it])
        rows.append((t, kap.real, kap.imag, kap_se, theory.real, theory.imag, ratio, ratio_se,
                     math.exp(-1.5 * t), acc.mean, acc.sem))
        if t == 1.0:
            summary["kappa3_ratio_t1"] = float(ratio)
            summary["kappa3_ratio_t1_sigma"] = float(ratio_se)
            summary["kappa3_ratio_t1_theory"] = math.exp(-1.5)
    diff = MCAccumulator().add(traces[:, iinf] - traces[:, i0])
    summary.update({
        "kappa3_base_theory": k0.real,
        "R_inf_minus_R_0": diff.mean, "R_inf_minus_R_0_sigma": diff.sem,
        "reference_shape": float(cfg.n) ** -3.5 * eta ** -4,
    })
    table = Table(("t", "kappa3_re", "kappa3_im", "kappa3_se", "kappa3_theory_re", "kappa3_theory_im",
                   "kappa3_ratio", "kappa3_ratio_se", "ratio_theory", "im_trace_mean", "im_trace_sem"),
                  rows)
    return Report("flow", cfg, summary, {"flow": table}, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# single Girko decomposition


@dataclass(frozen=True)
class GirkoConfig:
    n: int = 64
    field: str = "complex"
    distribution: str = "gaussian"
    stream: int = 0
    z0: complex = 1 + 0j
    bump: str = "mollifier"
    radius: float = 3.0
    power: int = 4
    delta: float = 0.05
    eta0: float | None = None
    T: float | None = None
    panels: int = 6
    order: int = 8
    seed: int = 1
    workers: int = 1

    def resolved(self):
        """Copy with ``eta0`` and ``T`` filled in; rejects ``eta0 >= T``."""
        eta0 = girko.default_eta0(self.n, self.delta) if self.eta0 is None else float(self.eta0)
        T = girko.default_T(self.n) if self.T is None else float(self.T)
        if not 0.0 < eta0 < T:
            raise ConfigError(f"need 0 < eta0 < T, got eta0={eta0!r}, T={T!r}")
        return dataclasses.replace(self, eta0=eta0, T=T)


def run_girko(cfg=GirkoConfig()):
    t0 = time.perf_counter()
    cfg = cfg.resolved()
    spec = EnsembleSpec(cfg.n, cfg.field, cfg.distribution, cfg.seed)
    f = girko.make_bump(cfg.bump, cfg.radius, cfg.power if cfg.bump.startswith("poly") else None)
    x = sample_iid(spec, cfg.stream)
    dec = girko.decompose_I(x, f, cfg.z0, eta0=cfg.eta0, T=cfg.T,
                            grid=girko.ZGrid(cfg.panels, cfg.order),
                            spectrum=eigenvalues(spec, cfg.stream))
    row = girko.decomposition_row(dec, cfg.seed)
    summary = {
        "lhs": dec.lhs, "logdet_rhs": dec.logdet_rhs, "det_term": dec.det_term,
        "girko_relative_residual": dec.girko_relative_residual,
        "decomposition_relative_residual": dec.relative_residual,
        "quadrature_error_estimate": dec.quadrature_error_estimate,
    }
    table = Table(girko.DECOMPOSITION_COLUMNS, [tuple(row[c] for c in girko.DECOMPOSITION_COLUMNS)])
    return Report("girko", cfg, summary, {"decomposition": table}, time.perf_counter() - t0)


def _fmt_complex(z):
    z = complex(z)
    return f"{z.real!r}{z.imag:+}j"


EXPERIMENTS = {
    "local-law": (LocalLawConfig, run_local_law),
    "edge-density": (EdgeDensityConfig, run_edge_density),
    "universality": (UniversalityConfig, run_universality),
    "sv-tail": (SVTailConfig, run_sv_tail),
    "flow": (FlowConfig, run_flow),
    "girko": (GirkoConfig, run_girko),
}
