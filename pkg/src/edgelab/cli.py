"""Command-line front end: ``edgelab <subcommand> [options]``.

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures. Every run writes one directory holding ``manifest.json`` and its CSV
tables under the output root (``--out``, else ``$EDGELAB_OUTPUT_ROOT``, else
``./runs``). Nothing is written when a run fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time

import numpy as np

from . import dyson, io, kernel
from .ensemble import DISTRIBUTIONS, FIELDS, EnsembleSpec, sample_iid
from .errors import ConfigError, NumericalError
from .experiments import EXPERIMENTS, Report, Table, eigenvalues
from .spectral import singular_values

__all__ = ["RunConfig", "parse_complex", "parse_grid", "validate_config", "build_parser",
           "dispatch", "main"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """A fully resolved experiment configuration."""

    experiment: str
    params: object
    output: str | None = None


def parse_complex(text):
    """Parse ``1+0i``, ``-0.5-2j``, ``i`` or ``3`` into a complex number."""
    t = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def parse_grid(text):
    """``a:b:logK`` (geometric) or ``a:b:linK`` (uniform) with ``K`` points."""
    try:
        a, b, spec = str(text).split(":")
        a, b = float(a), float(b)
        kind, k = spec[:3], int(spec[3:])
    except ValueError:
        raise ConfigError(f"grid {text!r} is not of the form a:b:logK or a:b:linK") from None
    if k < 1:
        raise ConfigError(f"grid {text!r} needs at least one point")
    if kind == "log":
        if a <= 0 or b <= 0:
            raise ConfigError(f"log grid {text!r} needs positive end points")
        return np.geomspace(a, b, k)
    if kind == "lin":
        return np.linspace(a, b, k)
    raise ConfigError(f"grid {text!r}: spacing must be 'log' or 'lin'")


def _convert(key, raw, default):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() in ("true", "yes", "1"):
                return True
            if raw.lower() in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw, 0)
        if isinstance(default, float) or default is None:
            if default is None and raw.lower() in ("none", ""):
                return None
            return float(raw)
        if isinstance(default, complex):
            return parse_complex(raw)
        if isinstance(default, tuple):
            items = [p for p in raw.split(",") if p.strip()]
            proto = default[0] if default else ""
            return tuple(_convert(key, p, proto) for p in items)
        return raw
    except (ValueError, ConfigError):
        raise ConfigError(f"config key {key!r}: cannot convert {raw!r} to "
                          f"{type(default).__name__ if default is not None else 'float'}") from None


def _build_params(experiment, values):
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {sorted(EXPERIMENTS)}")
    cls, _ = EXPERIMENTS[experiment]
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - set(fields))
    if unknown:
        raise ConfigError(f"unknown config key(s) for {experiment}: {', '.join(unknown)}")
    kwargs = {}
    for key, raw in values.items():
        kwargs[key] = _convert(key, raw, fields[key].default)
    params = cls(**kwargs)
    for name in ("distribution",):
        if hasattr(params, name) and getattr(params, name) not in DISTRIBUTIONS:
            raise ConfigError(f"unknown distribution {getattr(params, name)!r}")
    if hasattr(params, "field") and params.field not in FIELDS:
        raise ConfigError(f"unknown field {params.field!r}")
    if hasattr(params, "resolved"):
        params = params.resolved()
    return params


def _parse_pairs(text):
    values = {}
    for lineno, line in enumerate(str(text).splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = raw
    return values


def validate_config(text):
    """Parse ``key = value`` lines (``#`` comments) into a :class:`RunConfig`.

    ``experiment`` is required; every other key must be a parameter of that
    experiment, and absent parameters take their defaults, which the manifest
    echoes.
    """
    values = _parse_pairs(text)
    experiment = values.pop("experiment", "").strip()
    if not experiment:
        raise ConfigError("missing required key 'experiment'")
    output = values.pop("output", None)
    return RunConfig(experiment, _build_params(experiment, values), output)


# ---------------------------------------------------------------------------
# single-shot commands


def _run_sample(args):
    spec = EnsembleSpec(args.n, args.field, args.distribution, args.seed)
    t0 = time.perf_counter()
    sigma = eigenvalues(spec, args.stream)
    tables = {"spectrum": Table(("index", "re", "im"), io.spectrum_rows(sigma))}
    if args.z is not None:
        hs = singular_values(sample_iid(spec, args.stream), parse_complex(args.z), factors=False)
        tables["singular_values"] = Table(("index", "s"), io.singular_value_rows(hs))
    config = {"n": args.n, "field": args.field, "distribution": args.distribution,
              "seed": args.seed, "stream": args.stream, "z": args.z}
    summary = {"trace_minus_eigenvalue_sum": abs(np.trace(sample_iid(spec, args.stream).entries)
                                                 - sigma.sum())}
    return Report("sample", config, summary, tables, time.perf_counter() - t0)


def _run_dyson(args):
    t0 = time.perf_counter()
    zs = [parse_complex(z) for z in args.z]
    etas = parse_grid(args.eta_grid)
    rows = dyson.dyson_grid(zs, etas)
    summary = {"max_residual": max(r[-1] for r in rows), "points": len(rows)}
    config = {"z": [io.format_value(z) for z in zs], "eta_grid": args.eta_grid, "seed": 0}
    return Report("dyson", config,
                  summary, {"dyson": Table(("z_re", "z_im", "eta", "im_mhat", "u", "residual"), rows)},
                  time.perf_counter() - t0)


def _run_kernel(args):
    t0 = time.perf_counter()
    xi = parse_grid(args.xi_grid)
    rows = kernel.profile_table(xi, args.erf_scale)
    config = {"xi_grid": args.xi_grid, "erf_scale": args.erf_scale, "seed": 0}
    return Report("kernel", config, {"erf_scale": args.erf_scale},
                  {"edge_profile": Table(("xi", "rho"), rows)}, time.perf_counter() - t0)


def _experiment_runner(name):
    def run(args):
        values = {}
        if args.config:
            with open(args.config) as fh:
                values.update(_parse_pairs(fh.read()))
        named = values.pop("experiment", name).strip()
        if named != name:
            raise ConfigError(f"config file is for {named!r}, not {name!r}")
        output = values.pop("output", None)
        # later sources win: file, then --set, then dedicated flags
        for item in args.set or []:
            values.update(_parse_pairs(item))
        for key in ("seed", "workers"):
            if getattr(args, key, None) is not None:
                values[key] = str(getattr(args, key))
        values.update({k: str(v) for k, v in _experiment_flags(name, args).items()})
        if args.out is None and output:
            args.out = output
        return EXPERIMENTS[name][1](_build_params(name, values))
    return run


def _experiment_flags(name, args):
    flags = {}
    if name == "girko":
        for key in ("n", "z0", "delta", "eta0", "T", "field", "distribution", "radius", "bump"):
            val = getattr(args, key.lower() if key != "T" else "T", None)
            if val is not None:
                flags[key] = val
    return flags


def build_parser():
    parser = argparse.ArgumentParser(prog="edgelab",
                                     description="Non-Hermitian random matrix laboratory.")
    parser.add_argument("--out", help="output root (overrides $EDGELAB_OUTPUT_ROOT)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one matrix and write its spectrum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--field", choices=FIELDS, default="complex")
    p.add_argument("--distribution", choices=DISTRIBUTIONS, default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--z", help="also write singular values of X - z")
    p.set_defaults(run=_run_sample)

    p = sub.add_parser("dyson", help="solve the scalar Dyson equation on a grid")
    p.add_argument("--z", action="append", required=True, help="repeatable, e.g. 1+0i")
    p.add_argument("--eta-grid", required=True, help="a:b:logK or a:b:linK")
    p.set_defaults(run=_run_dyson)

    p = sub.add_parser("kernel", help="tabulate the edge density profile")
    p.add_argument("--xi-grid", default="-5:5:lin101")
    p.add_argument("--erf-scale", type=float, default=1.0)
    p.set_defaults(run=_run_kernel)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one parameter")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        if name == "girko":
            p.add_argument("--n", type=int)
            p.add_argument("--z0")
            p.add_argument("--delta", type=float)
            p.add_argument("--eta0", type=float)
            p.add_argument("--T", dest="T", type=float)
            p.add_argument("--field", choices=FIELDS)
            p.add_argument("--distribution", choices=DISTRIBUTIONS)
            p.add_argument("--radius", type=float)
            p.add_argument("--bump", choices=("mollifier", "polynomial"))
        p.set_defaults(run=_experiment_runner(name))
    return parser


def dispatch(argv=None):
    """Run one subcommand; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        report = args.run(args)
        directory = io.write_run(report, io.output_root(args.out), argv)
    except ConfigError as exc:
        print(f"edgelab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"edgelab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(directory)
    return EXIT_OK


def main():
    sys.exit(dispatch())


if __name__ == "__main__":  # pragma: no cover
    main()
