"""Running scenarios to disk, reading runs back, and comparing them.

A run directory holds

* ``canal_<name>.csv``: one row per cell per output time, header
  ``t,x,<fields>`` (by default ``t,x,h,q,v``), 17 significant digits;
* ``junctions.csv``: one row per junction solve, with the solved face
  states, Newton iterations, residual and the existence determinant;
* ``manifest.json``: config echo, package version, constants, solver
  tolerances, timings, and the failure record if the run stopped early.

Imported samples (for instance mid-channel lines from another solver) use
the same ``canal_<name>.csv`` layout; they may carry ``vx,vy`` columns in
place of ``v``, in which case velocities are compared by magnitude.
"""

import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import junction as jsolver
from .exceptions import SimulationError
from .network import run
from .scenarios import build_network, cadence, time_controls, to_dict
from .swe import RIEMANN_TOL

CANAL_PREFIX = "canal_"
JUNCTION_LOG = "junctions.csv"
MANIFEST = "manifest.json"
JUNCTION_COLUMNS = ("step", "t", "junction", "h1", "h2", "h3", "v1", "v2", "v3",
                    "iterations", "residual", "determinant")
NORMS = ("l1", "l2", "linf")
TIME_MATCH = 1e-12


def _version():
    from . import __version__
    return __version__


def _fmt(value):
    return format(float(value), ".17g")


@dataclass(eq=False)
class CanalTable:
    """Rows of ``t, x, <fields>`` for one canal."""

    columns: tuple
    data: np.ndarray

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.columns))

    def column(self, name):
        return self.data[:, self.columns.index(name)]

    @property
    def times(self):
        return np.unique(self.column("t"))

    def at(self, t):
        """Rows of output time ``t`` (matched to ``TIME_MATCH``)."""
        rows = np.abs(self.column("t") - t) <= TIME_MATCH * max(1.0, abs(t))
        return CanalTable(self.columns, self.data[rows])

    def field(self, name):
        """Column ``name``; ``speed`` is ``|v|`` or ``sqrt(vx^2 + vy^2)``."""
        if name == "speed":
            if "v" in self.columns:
                return np.abs(self.column("v"))
            return np.hypot(self.column("vx"), self.column("vy"))
        return self.column(name)

    def has(self, name):
        if name == "speed":
            return "v" in self.columns or {"vx", "vy"} <= set(self.columns)
        return name in self.columns


@dataclass(eq=False)
class RunArtifacts:
    tables: dict
    junction_log: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)
    directory: Optional[str] = None

    @property
    def ok(self):
        return self.manifest.get("status", "ok") == "ok"


# --------------------------------------------------------------------------- #
# Running                                                                      #
# --------------------------------------------------------------------------- #


def _snapshot_rows(state, fields):
    out = {}
    for name, canal in state.canals.items():
        cols = {"h": canal.h, "q": canal.q, "v": canal.v}
        t = np.full(canal.cells, state.t)
        out[name] = np.column_stack([t, canal.x] + [cols[f] for f in fields])
    return out


def run_scenario(cfg, out_dir=None, opts=jsolver.NewtonOptions()):
    """Run ``cfg``; write the run directory when ``out_dir`` is given.

    A simulation failure does not raise: the returned artifacts carry
    ``manifest["status"] == "failed"`` and a ``failure`` record with the
    failing step, time, junction and trace, and all output produced up to
    that point is kept.
    """
    fields = tuple(cfg.output.fields)
    columns = ("t", "x") + fields
    chunks = {c.name: [] for c in cfg.canals}
    log = []

    def observer(state):
        for name, rows in _snapshot_rows(state, fields).items():
            chunks[name].append(rows)

    def on_step(state):
        for rec in state.records:
            log.append((rec.step, rec.t, rec.junction, *rec.x, rec.iterations,
                        rec.residual, rec.determinant))

    state = build_network(cfg)
    failure = None
    start = time.perf_counter()
    try:
        run(state, time_controls(cfg), cfg.constants, observer, cadence(cfg), opts, on_step)
    except SimulationError as exc:
        failure = {"message": str(exc), "step": exc.step, "time": exc.time,
                   "junction": exc.junction, "trace": exc.trace}
    elapsed = time.perf_counter() - start

    tables = {name: CanalTable(columns, np.vstack(rows) if rows else np.empty((0, len(columns))))
              for name, rows in chunks.items()}
    manifest = {
        "name": cfg.name,
        "version": _version(),
        "status": "ok" if failure is None else "failed",
        "config": to_dict(cfg),
        "g": cfg.g,
        "cfl": cfg.time.cfl,
        "junction_model": cfg.junction_model,
        "tolerances": {"newton_tol": opts.tol, "newton_max_iter": opts.max_iter,
                       "newton_damping": opts.damping, "newton_min_step": opts.min_step,
                       "riemann_tol": RIEMANN_TOL},
        "steps": state.step,
        "t_final": state.t,
        "output_times": [float(t) for t in
                         (np.unique(np.concatenate([tab.times for tab in tables.values()]))
                          if tables else [])],
        "timings": {"run_seconds": elapsed},
        "failure": failure,
    }
    arts = RunArtifacts(tables, log, manifest, out_dir)
    if out_dir is not None:
        write_run(arts, out_dir)
    return arts


# --------------------------------------------------------------------------- #
# Files                                                                        #
# --------------------------------------------------------------------------- #


def write_table(path, table):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.data:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_table(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty file")
        columns = tuple(c.strip() for c in header.split(","))
        if not {"t", "x"} <= set(columns):
            raise ValueError(f"{path}: header must contain t and x, got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        data = np.empty((0, len(columns)))
    return CanalTable(columns, data)


def write_run(arts, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name, table in arts.tables.items():
        write_table(os.path.join(out_dir, f"{CANAL_PREFIX}{name}.csv"), table)
    with open(os.path.join(out_dir, JUNCTION_LOG), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(JUNCTION_COLUMNS) + "\n")
        for row in arts.junction_log:
            step, t, name, *rest = row
            nums = [_fmt(v) for v in rest]
            nums[6] = str(int(rest[6]))
            fh.write(",".join([str(step), _fmt(t), name] + nums) + "\n")
    with open(os.path.join(out_dir, MANIFEST), "w", encoding="utf-8") as fh:
        json.dump(arts.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    arts.directory = out_dir


def read_run(directory):
    """Read a run (or an imported sample) directory back into memory."""
    tables = {}
    for fname in sorted(os.listdir(directory)):
        if fname.startswith(CANAL_PREFIX) and fname.endswith(".csv"):
            tables[fname[len(CANAL_PREFIX):-4]] = read_table(os.path.join(directory, fname))
    if not tables:
        raise FileNotFoundError(f"{directory}: no {CANAL_PREFIX}*.csv files")
    log = []
    log_path = os.path.join(directory, JUNCTION_LOG)
    if os.path.exists(log_path):
        with open(log_path, encoding="utf-8") as fh:
            fh.readline()
            for line in fh:
                parts = line.rstrip("\n").split(",")
                step, t, name = int(parts[0]), float(parts[1]), parts[2]
                nums = [float(p) for p in parts[3:]]
                nums[6] = int(parts[9])
                log.append((step, t, name, *nums))
    manifest = {}
    man_path = os.path.join(directory, MANIFEST)
    if os.path.exists(man_path):
        with open(man_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    return RunArtifacts(tables, log, manifest, directory)


# --------------------------------------------------------------------------- #
# Comparison                                                                   #
# --------------------------------------------------------------------------- #


class IncompatibleRunsError(ValueError):
    """The runs share no canal/time, or their grids differ without interpolation."""


def cell_weights(x):
    """Lengths of the cells around the sample points ``x`` (midpoint rule)."""
    x = np.asarray(x, dtype=float)
    if x.size == 1:
        return np.ones(1)
    edges = np.concatenate([[x[0] - 0.5 * (x[1] - x[0])], 0.5 * (x[1:] + x[:-1]),
                            [x[-1] + 0.5 * (x[-1] - x[-2])]])
    return np.diff(edges)


def norm_values(diff, weights, norms=NORMS):
    diff = np.abs(diff)
    out = {}
    for n in norms:
        if n == "l1":
            out[n] = float(np.sum(diff * weights))
        elif n == "l2":
            out[n] = float(math.sqrt(np.sum(diff * diff * weights)))
        elif n == "linf":
            out[n] = float(np.max(diff)) if diff.size else 0.0
        else:
            raise ValueError(f"unknown norm {n!r}; choose from {NORMS}")
    return out


def _compared_fields(ta, tb, fields):
    if fields is not None:
        return list(fields)
    sample = not ("v" in ta.columns and "v" in tb.columns)
    out = [f for f in ("h", "q", "v") if ta.has(f) and tb.has(f)]
    if sample and ta.has("speed") and tb.has("speed"):
        out.append("speed")
    return out


def compare_runs(a, b, norms=NORMS, fields=None, interpolate=False):
    """Differences between runs ``a`` and ``b``.

    Canals are matched by name and output times by value. Norms are taken
    on ``a``'s sample points, weighted by the cell lengths around them.
    With ``interpolate``, ``b`` is linearly interpolated onto ``a``'s points;
    otherwise the points must coincide.

    Returns
    -------
    list of dict
        One entry per canal, time and field with keys ``canal``, ``t``,
        ``field`` and one per requested norm.
    """
    norms = tuple(norms)
    for n in norms:
        if n not in NORMS:
            raise ValueError(f"unknown norm {n!r}; choose from {NORMS}")
    common = [n for n in a.tables if n in b.tables]
    if not common:
        raise IncompatibleRunsError("the runs share no canal names")
    report = []
    for name in common:
        ta, tb = a.tables[name], b.tables[name]
        times_b = tb.times
        shared = [float(t) for t in ta.times
                  if np.any(np.abs(times_b - t) <= TIME_MATCH * max(1.0, abs(t)))]
        if not shared:
            raise IncompatibleRunsError(f"canal {name}: no common output times")
        for t in shared:
            ra, rb = ta.at(t), tb.at(t)
            xa, xb = ra.column("x"), rb.column("x")
            same_grid = xa.shape == xb.shape and np.allclose(xa, xb, rtol=0, atol=1e-12)
            if not same_grid and not interpolate:
                raise IncompatibleRunsError(
                    f"canal {name} at t={t!r}: sample points differ; enable interpolation")
            weights = cell_weights(xa)
            for f in _compared_fields(ra, rb, fields):
                if not (ra.has(f) and rb.has(f)):
                    raise IncompatibleRunsError(f"canal {name}: field {f!r} missing in one run")
                fa, fb = ra.field(f), rb.field(f)
                if not same_grid:
                    order = np.argsort(xb)
                    fb = np.interp(xa, xb[order], fb[order])
                entry = {"canal": name, "t": float(t), "field": f}
                entry.update(norm_values(fa - fb, weights, norms))
                report.append(entry)
    return report


def max_norms(report):
    """Largest value of each norm over a comparison report."""
    out = {}
    for entry in report:
        for n in NORMS:
            if n in entry:
                out[n] = max(out.get(n, 0.0), entry[n])
    return out


# --------------------------------------------------------------------------- #
# Refinement studies                                                           #
# --------------------------------------------------------------------------- #


def restrict(values, factor):
    """Cell averages of ``values`` on a grid ``factor`` times coarser."""
    values = np.asarray(values, dtype=float)
    if values.size % factor:
        raise ValueError(f"{values.size} cells cannot be grouped by {factor}")
    return values.reshape(-1, factor).mean(axis=1)


def smooth_mask(fine, coarse_cells, dx_fine, max_gradient=0.1, pad=2):
    """Coarse cells away from steep features of a fine-grid profile.

    A fine cell is steep when ``|dh/dx| > max_gradient``; steep cells are
    widened by ``pad`` fine cells on each side, and a coarse cell is smooth
    when none of the fine cells it covers is steep.
    """
    fine = np.asarray(fine, dtype=float)
    steep = np.abs(np.gradient(fine, dx_fine)) > max_gradient
    if pad:
        steep = np.convolve(steep.astype(float), np.ones(2 * pad + 1), mode="same") > 0
    factor = fine.size // coarse_cells
    return ~steep.reshape(coarse_cells, factor).any(axis=1)


def self_differences(profiles, lengths, field_masks=None):
    """L1 distances between successive levels of a refinement ladder.

    Parameters
    ----------
    profiles : list of dict
        ``{canal: cell values}`` per level, coarsest first, each level
        refining the previous one by an integer factor.
    lengths : dict
        Canal lengths.
    field_masks : list of dict, optional
        ``{canal: bool array}`` per level (except the finest) selecting the
        coarse cells that enter the sum.
    """
    out = []
    for k in range(len(profiles) - 1):
        coarse, fine = profiles[k], profiles[k + 1]
        total = 0.0
        for name, uc in coarse.items():
            factor = fine[name].size // uc.size
            diff = np.abs(uc - restrict(fine[name], factor))
            if field_masks is not None:
                diff = diff[field_masks[k][name]]
            total += float(np.sum(diff)) * lengths[name] / uc.size
        out.append(total)
    return out


def observed_orders(differences, ratio=2.0):
    """``log_ratio(e_k / e_{k+1})`` for successive self-differences."""
    d = np.asarray(differences, dtype=float)
    return np.log(d[:-1] / d[1:]) / math.log(ratio)


def refinement_study(runs, field="h", t=None, max_gradient=0.1, pad=2):
    """Self-convergence of a ladder of runs (coarsest first).

    Uses cell values at output time ``t`` (default: the last common one).
    Returns a dict with the full-domain differences and orders, and the same
    restricted to smooth regions of the finest run.
    """
    if len(runs) < 3:
        raise ValueError("a refinement study needs at least three runs")
    names = list(runs[0].tables)
    if t is None:
        t = float(min(max(r.tables[n].times) for r in runs for n in names))
    profiles, lengths, xs = [], {}, []
    for r in runs:
        level = {}
        for n in names:
            rows = r.tables[n].at(t)
            level[n] = rows.field(field)
            x = rows.column("x")
            dx = x[1] - x[0]
            lengths[n] = dx * x.size
        profiles.append(level)
    finest = profiles[-1]
    masks = []
    for level in profiles[:-1]:
        masks.append({n: smooth_mask(finest[n], level[n].size, lengths[n] / finest[n].size,
                                     max_gradient, pad) for n in names})
    full = self_differences(profiles, lengths)
    smooth = self_differences(profiles, lengths, masks)
    ratio = profiles[1][names[0]].size / profiles[0][names[0]].size
    return {
        "t": t,
        "cells": [p[names[0]].size for p in profiles],
        "differences": full,
        "orders": observed_orders(full, ratio).tolist(),
        "smooth_differences": smooth,
        "smooth_orders": observed_orders(smooth, ratio).tolist(),
    }


def synthetic_sample(arts, angles):
    """Mid-channel sample in the imported-2D layout built from a 1D run.

    ``angles`` maps canal names to the direction of their axis; the sample
    stores ``vx, vy`` as the 1D velocity rotated onto that direction.
    """
    tables = {}
    for name, table in arts.tables.items():
        ang = angles.get(name, 0.0)
        v = table.column("v")
        vx, vy = _rotate_exact_norm(v, ang)
        data = np.column_stack([table.column("t"), table.column("x"), table.column("h"), vx, vy])
        tables[name] = CanalTable(("t", "x", "h", "vx", "vy"), data)
    return RunArtifacts(tables)


def _rotate_exact_norm(v, ang, max_nudges=8):
    """``v`` rotated by ``ang``, with ``vy`` nudged by ulps so ``hypot(vx, vy) == |v|``."""
    vx = v * math.cos(ang)
    vy = v * math.sin(ang)
    speed = np.abs(v)
    for _ in range(max_nudges):
        d = np.hypot(vx, vy) - speed
        if not d.any():
            break
        vy = np.where(d > 0, np.nextafter(vy, 0.0),
                      np.where(d < 0, np.nextafter(vy, np.copysign(np.inf, vy)), vy))
    return vx, vy
