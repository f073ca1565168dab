"""CSV tables and JSON manifests for run directories.

CSV files have a header row, use ``.`` as the decimal mark, write floats with
``repr`` (round-trip exact) and seeds as lowercase hexadecimal.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
import platform
import sys
from pathlib import Path

import numpy as np

__all__ = [
    "OUTPUT_ROOT_ENV", "output_root", "format_value", "write_csv", "to_jsonable",
    "run_directory", "write_run", "spectrum_rows", "singular_value_rows",
]

OUTPUT_ROOT_ENV = "EDGELAB_OUTPUT_ROOT"


def output_root(explicit=None):
    """``explicit`` if given, else ``$EDGELAB_OUTPUT_ROOT``, else ``./runs``."""
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(OUTPUT_ROOT_ENV) or "runs")


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return f"{v.real!r}{v.imag:+}j"
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def to_jsonable(obj):
    """Recursively convert configs and summaries into JSON-safe values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else format_value(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return format_value(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


def _versions():
    import scipy

    from . import __version__

    return {"edgelab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def run_directory(root, experiment, config):
    """Stable directory name: experiment, seed in hex, short hash of the config."""
    cfg = to_jsonable(config)
    digest = hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:10]
    seed = int(cfg.get("seed", 0)) if isinstance(cfg, dict) else 0
    return Path(root) / f"{experiment}-{seed:x}-{digest}"


def write_run(report, root, argv=None):
    """Write ``manifest.json`` and one CSV per table; returns the run directory."""
    directory = run_directory(root, report.experiment, report.config)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for name, table in report.tables.items():
        fname = f"{name}.csv"
        write_csv(directory / fname, table.columns, table.rows)
        files.append(fname)
    cfg = to_jsonable(report.config)
    manifest = {
        "experiment": report.experiment,
        "config": cfg,
        "seed": f"{int(cfg.get('seed', 0)):x}" if isinstance(cfg, dict) else "0",
        "versions": _versions(),
        "wall_time_seconds": report.wall_time,
        "summary": to_jsonable(report.summary),
        "files": files,
        "argv": list(argv) if argv is not None else list(sys.argv[1:]),
    }
    with open(directory / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return directory


def spectrum_rows(sigma):
    """Rows ``(index, re, im)`` of a complex spectrum."""
    sigma = np.asarray(getattr(sigma, "sigma", sigma))
    return [(i, float(s.real), float(s.imag)) for i, s in enumerate(sigma)]


def singular_value_rows(hs):
    """Rows ``(index, s)`` of a singular-value list."""
    return [(i, float(s)) for i, s in enumerate(np.asarray(getattr(hs, "s", hs)))]
