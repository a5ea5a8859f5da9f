"""Run directories: writing and reading optimization artifacts, plot-ready exports."""

import csv
import json
import math
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .flow import ControlSchedule, EnsembleLattice, ensemble_sweep
from .objective import pushforward_values
from .optimizer import HistoryRow, OptimizerConfig
from .states import get_target

RUN_FILES = ("config.json", "history.csv", "control.csv", "pushforward.csv", "summary.json")
MANIFEST = "manifest.json"
MAX_FLOW_PARTICLES = 64


class RunDirectoryError(RuntimeError):
    pass


def prepare_directory(path, force=False):
    path = Path(path)
    if path.exists() and any(path.iterdir()) and not force:
        raise RunDirectoryError(f"{path} already exists and is not empty (use --force to overwrite)")
    path.mkdir(parents=True, exist_ok=True)
    return path


def append_manifest(path, command, config, artifacts, exit_status):
    """Append one entry to ``manifest.json``; earlier entries are never rewritten."""
    path = Path(path)
    manifest = path / MANIFEST
    entries = json.loads(manifest.read_text())["entries"] if manifest.exists() else []
    entries.append({
        "command": command,
        "config": config,
        "artifacts": sorted(str(a) for a in artifacts),
        "exit_status": exit_status,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    })
    manifest.write_text(json.dumps({"entries": entries}, indent=2) + "\n")


def _fmt(v):
    return repr(float(v))


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_run(path, config, result):
    """Write the standard file set of a descent run into ``path``."""
    path = Path(path)
    (path / "config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n")
    write_rows(path / "history.csv", HistoryRow.NUMERIC_FIELDS,
               ([getattr(r, f) for f in HistoryRow.NUMERIC_FIELDS] for r in result.history.rows))
    u = result.control
    t = u.nodes
    write_rows(path / "control.csv", ("k", "t_start", "t_end", "u0", "u1", "u2"),
               ([k + 1, t[k], t[k + 1], *u.values[k]] for k in range(u.K)))
    psi0 = get_target(config.initial)
    psi1 = get_target(config.target, config.target_path)
    lattice = EnsembleLattice(config.lattice_size)
    f, _ = pushforward_values(u, psi0, lattice)
    g = np.asarray(psi1(lattice.points), dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128)
    write_rows(path / "pushforward.csv", ("x", "re_f", "im_f", "re_target", "im_target"),
               zip(lattice.points, f.real, f.imag, g.real, g.imag))
    report = result.report
    summary = {
        "total": report.total,
        "reg_term": report.reg_term,
        "transfer_term": report.transfer_term,
        "mismatch": report.mismatch,
        "optimal_phase": report.optimal_phase,
        "seed": config.seed,
        "gradient_evaluations": result.gradient_evaluations,
        "aborted": result.aborted,
        "abort_reason": result.abort_reason,
        "wall_clock_seconds": result.seconds,
    }
    (path / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return [path / name for name in RUN_FILES]


def load_config(path):
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise RunDirectoryError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise RunDirectoryError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise RunDirectoryError(f"config file {path} must contain a JSON object")
    return OptimizerConfig.from_dict(data)


def load_control(path):
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append([float(row["u0"]), float(row["u1"]), float(row["u2"])])
    return ControlSchedule(np.array(rows))


def load_run(path):
    """Return ``(config, control, summary)`` of a complete run directory."""
    path = Path(path)
    missing = [name for name in RUN_FILES if not (path / name).is_file()]
    if missing:
        raise RunDirectoryError(f"{path} is not a complete run directory (missing {', '.join(missing)})")
    config = load_config(path / "config.json")
    control = load_control(path / "control.csv")
    summary = json.loads((path / "summary.json").read_text())
    return config, control, summary


def export_plots(path):
    """Write ``states.csv``, ``controls.csv`` and ``flow.csv`` next to the run files."""
    path = Path(path)
    config, u, _ = load_run(path)
    psi0 = get_target(config.initial)
    psi1 = get_target(config.target, config.target_path)
    lattice = EnsembleLattice(config.lattice_size)
    x = lattice.points
    achieved, traj = pushforward_values(u, psi0, lattice)

    nonneg = psi0.is_nonnegative_real and psi1.is_nonnegative_real
    if nonneg:
        cols = (x, np.real(psi0(x)), np.real(psi1(x)), np.real(achieved))
    else:
        cols = (x, np.abs(psi0(x)), np.abs(psi1(x)), np.abs(achieved))
    write_rows(path / "states.csv", ("x", "initial", "target", "achieved"), zip(*cols))

    t = u.nodes
    steps = []
    for k in range(u.K):
        steps.append([t[k], *u.values[k]])
        steps.append([t[k + 1], *u.values[k]])
    write_rows(path / "controls.csv", ("t", "u0", "u1", "u2"), steps)

    stride = max(1, math.ceil(lattice.size / MAX_FLOW_PARTICLES))
    tracked = np.arange(0, lattice.size, stride)
    # unwrap so that curves crossing 2*pi stay continuous
    paths = np.unwrap(traj.states[:, tracked], axis=0)
    write_rows(path / "flow.csv", ["t_k"] + [f"particle_{j}" for j in tracked],
               ([t[k], *paths[k]] for k in range(u.K + 1)))
    return [path / "states.csv", path / "controls.csv", path / "flow.csv"]


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    return Path(path)


def ensure_parent(path):
    os.makedirs(Path(path).parent, exist_ok=True)
