"""Scenario documents: parsing, validation, rendering and named presets.

A scenario is a YAML document with five sections::

    name: test71
    geometry:
      canals:
        - {name: c1, length: 3.5, cells: 96, half_width: 1.0}
        - {name: c2, length: 3.5, cells: 96, half_width: 1.0}
        - {name: c3, length: 3.5, cells: 96, half_width: 1.0}
      junctions:
        - {name: J, theta: pi/6, phi: -pi/6, incoming: c1, outgoing: [c2, c3]}
    physics: {g: 9.81, junction_model: momentum}
    initial:
      c1: [{until: 1.75, h: 1.5, v: 0.0}, {h: 1.0, v: 0.0}]
      c2: [{h: 1.0, v: 0.0}]
      c3: [{h: 1.0, v: 0.0}]
    time: {t_end: 0.9, cfl: 0.9}
    output: {every: null, times: [0.9], fields: [h, q, v]}

``geometry``, ``initial`` and ``time`` are required; ``physics`` and
``output`` fall back to defaults. Angles are numbers in radians or strings
of the form ``[-][k*]pi[/m]``. Initial segments are applied in order: a
cell whose center is ``<= until`` takes the first matching segment, and the
last segment (no ``until``) fills the rest.
"""

import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import yaml

from .exceptions import ConfigError, SWJunctionError
from .geometry import JunctionShape, build
from .network import JUNCTION_MODELS, Canal, Cadence, NetworkState, TimeControls
from .swe import G_DEFAULT, PhysicalConstants

FIELDS = ("h", "q", "v")
REQUIRED_SECTIONS = ("geometry", "initial", "time")
OPTIONAL_SECTIONS = ("name", "physics", "output")

_ANGLE = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?:(?P<num>\d+(?:\.\d*)?)\s*\*\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


# --------------------------------------------------------------------------- #
# Config types                                                                 #
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class CanalSpec:
    name: str
    length: float
    cells: int
    half_width: float

    @property
    def dx(self):
        return self.length / self.cells


@dataclass(frozen=True)
class JunctionSpec:
    name: str
    theta: float
    phi: float
    incoming: str
    outgoing: tuple


@dataclass(frozen=True)
class Segment:
    """Constant ``(h, v)`` on cells with center ``<= until`` (or everywhere left)."""

    h: float
    v: float = 0.0
    until: Optional[float] = None


@dataclass(frozen=True)
class TimeSpec:
    t_end: float
    cfl: float = 0.9
    max_steps: int = 10_000_000


@dataclass(frozen=True)
class OutputSpec:
    every: Optional[int] = None
    times: tuple = ()
    fields: tuple = FIELDS


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    canals: tuple
    junctions: tuple
    initial: tuple  # ((canal name, (Segment, ...)), ...) in canal order
    time: TimeSpec
    g: float = G_DEFAULT
    junction_model: str = "momentum"
    output: OutputSpec = field(default_factory=OutputSpec)

    @property
    def constants(self):
        return PhysicalConstants(self.g)

    def canal(self, name):
        for spec in self.canals:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def segments(self, name):
        return dict(self.initial)[name]

    def with_overrides(self, cfl=None, cells=None, junction_model=None, t_end=None):
        """Copy with command-line style overrides; the result is re-validated."""
        cfg = self
        if cells is not None:
            cfg = replace(cfg, canals=tuple(replace(c, cells=int(cells)) for c in cfg.canals))
        if cfl is not None or t_end is not None:
            time = replace(cfg.time, cfl=cfg.time.cfl if cfl is None else float(cfl),
                           t_end=cfg.time.t_end if t_end is None else float(t_end))
            cfg = replace(cfg, time=time)
        if junction_model is not None:
            cfg = replace(cfg, junction_model=junction_model)
        errors = validate(cfg)
        if errors:
            raise ConfigError(errors)
        return cfg


# --------------------------------------------------------------------------- #
# Parsing                                                                      #
# --------------------------------------------------------------------------- #


def parse_angle(value):
    """Radians from a number or a string like ``"pi/6"`` or ``"-3*pi/8"``."""
    if isinstance(value, bool):
        raise ValueError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE.match(value)
        if m:
            num = float(m.group("num") or 1.0)
            den = float(m.group("den") or 1.0)
            out = num * math.pi / den
            return -out if m.group("sign") == "-" else out
        try:
            return float(value)
        except ValueError:
            pass
    raise ValueError(f"not an angle: {value!r}")


class _Collector:
    """Accumulates ``path: message`` errors while reading a document."""

    def __init__(self):
        self.errors = []

    def add(self, path, message):
        self.errors.append(f"{path}: {message}")

    def mapping(self, value, path):
        if not isinstance(value, dict):
            self.add(path, "expected a mapping")
            return None
        return value

    def number(self, mapping, key, path, default=None, required=True, kind=float):
        if key not in mapping or mapping[key] is None:
            if required and default is None:
                self.add(f"{path}.{key}", "missing")
            return default
        value = mapping[key]
        if isinstance(value, str):
            # YAML 1.1 reads exponents without a dot (1e-3) as strings
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add(f"{path}.{key}", f"expected a number, got {value!r}")
            return default
        if kind is int:
            if float(value) != int(value):
                self.add(f"{path}.{key}", f"expected an integer, got {value!r}")
                return default
            return int(value)
        if not math.isfinite(value):
            self.add(f"{path}.{key}", f"must be finite, got {value!r}")
            return default
        return float(value)

    def unknown(self, mapping, allowed, path):
        for key in mapping:
            if key not in allowed:
                self.add(f"{path}.{key}", "unknown key")


def _load_yaml(text):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ConfigError(
                f"syntax error at line {mark.line + 1}, column {mark.column + 1}: {problem}"
            ) from exc
        raise ConfigError(f"syntax error: {problem}") from exc


def parse_config(text):
    """Parse and validate a scenario document.

    Raises
    ------
    ConfigError
        With every problem found: a syntax error carries line and column,
        semantic errors carry the dotted path of the offending field.
    """
    doc = _load_yaml(text)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("document: expected a mapping with sections "
                          + ", ".join(REQUIRED_SECTIONS))
    col = _Collector()
    missing = [s for s in REQUIRED_SECTIONS if s not in doc]
    if missing:
        col.add("document", "missing required sections: " + ", ".join(missing))
    col.unknown(doc, REQUIRED_SECTIONS + OPTIONAL_SECTIONS, "document")

    name = doc.get("name", "scenario")
    if not isinstance(name, str):
        col.add("name", "expected a string")
        name = "scenario"

    canals, junctions = _read_geometry(doc.get("geometry"), col, "geometry" in doc)
    g, model = _read_physics(doc.get("physics", {}), col)
    initial = _read_initial(doc.get("initial"), col, "initial" in doc)
    time = _read_time(doc.get("time"), col, "time" in doc)
    output = _read_output(doc.get("output", {}), col)
    if col.errors:
        raise ConfigError(col.errors)

    order = [c.name for c in canals]
    initial_items = tuple((n, initial[n]) for n in order if n in initial)
    initial_items += tuple((n, s) for n, s in initial.items() if n not in order)
    cfg = ScenarioConfig(name, tuple(canals), tuple(junctions), initial_items, time, g, model, output)
    errors = validate(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def _read_geometry(geo, col, present):
    canals, junctions = [], []
    if not present:
        return canals, junctions
    geo = col.mapping(geo, "geometry")
    if geo is None:
        return canals, junctions
    col.unknown(geo, ("canals", "junctions"), "geometry")
    raw_canals = geo.get("canals")
    if not isinstance(raw_canals, list) or not raw_canals:
        col.add("geometry.canals", "expected a non-empty list")
        raw_canals = []
    for i, item in enumerate(raw_canals):
        path = f"geometry.canals[{i}]"
        item = col.mapping(item, path)
        if item is None:
            continue
        col.unknown(item, ("name", "length", "cells", "half_width"), path)
        name = item.get("name")
        if not isinstance(name, str) or not name:
            col.add(f"{path}.name", "expected a non-empty string")
            continue
        length = col.number(item, "length", path)
        cells = col.number(item, "cells", path, kind=int)
        width = col.number(item, "half_width", path)
        if None in (length, cells, width):
            continue
        canals.append(CanalSpec(name, length, cells, width))
    raw_junctions = geo.get("junctions", [])
    if raw_junctions is None:
        raw_junctions = []
    if not isinstance(raw_junctions, list):
        col.add("geometry.junctions", "expected a list")
        raw_junctions = []
    for i, item in enumerate(raw_junctions):
        path = f"geometry.junctions[{i}]"
        item = col.mapping(item, path)
        if item is None:
            continue
        col.unknown(item, ("name", "theta", "phi", "incoming", "outgoing"), path)
        angles = {}
        for key in ("theta", "phi"):
            if key not in item:
                col.add(f"{path}.{key}", "missing")
                continue
            try:
                angles[key] = parse_angle(item[key])
            except ValueError as exc:
                col.add(f"{path}.{key}", str(exc))
        outgoing = item.get("outgoing")
        if not (isinstance(outgoing, list) and len(outgoing) == 2
                and all(isinstance(o, str) for o in outgoing)):
            col.add(f"{path}.outgoing", "expected a list of two canal names")
            outgoing = None
        incoming = item.get("incoming")
        if not isinstance(incoming, str):
            col.add(f"{path}.incoming", "expected a canal name")
            incoming = None
        name = item.get("name", f"J{i + 1}")
        if len(angles) == 2 and outgoing and incoming:
            junctions.append(JunctionSpec(str(name), angles["theta"], angles["phi"],
                                          incoming, tuple(outgoing)))
    return canals, junctions


def _read_physics(phys, col):
    phys = col.mapping(phys if phys is not None else {}, "physics")
    if phys is None:
        return G_DEFAULT, "momentum"
    col.unknown(phys, ("g", "junction_model"), "physics")
    g = col.number(phys, "g", "physics", default=G_DEFAULT)
    model = phys.get("junction_model", "momentum")
    return g, model


def _read_initial(init, col, present):
    out = {}
    if not present:
        return out
    init = col.mapping(init, "initial")
    if init is None:
        return out
    for name, segs in init.items():
        path = f"initial.{name}"
        if isinstance(segs, dict):
            segs = [segs]
        if not isinstance(segs, list) or not segs:
            col.add(path, "expected a non-empty list of segments")
            continue
        parsed = []
        for j, seg in enumerate(segs):
            spath = f"{path}[{j}]"
            seg = col.mapping(seg, spath)
            if seg is None:
                continue
            col.unknown(seg, ("h", "v", "until"), spath)
            h = col.number(seg, "h", spath)
            v = col.number(seg, "v", spath, default=0.0)
            until = col.number(seg, "until", spath, required=False)
            if h is not None:
                parsed.append(Segment(h, v, until))
        out[str(name)] = tuple(parsed)
    return out


def _read_time(time, col, present):
    if not present:
        return None
    time = col.mapping(time, "time")
    if time is None:
        return None
    col.unknown(time, ("t_end", "cfl", "max_steps"), "time")
    t_end = col.number(time, "t_end", "time")
    cfl = col.number(time, "cfl", "time", default=0.9)
    max_steps = col.number(time, "max_steps", "time", default=10_000_000, kind=int)
    if t_end is None:
        return None
    return TimeSpec(t_end, cfl, max_steps)


def _read_output(out, col):
    out = col.mapping(out if out is not None else {}, "output")
    if out is None:
        return OutputSpec()
    col.unknown(out, ("every", "times", "fields"), "output")
    every = col.number(out, "every", "output", required=False, kind=int)
    times = out.get("times", []) or []
    if not isinstance(times, list) or any(
            isinstance(t, bool) or not isinstance(t, (int, float)) for t in times):
        col.add("output.times", "expected a list of numbers")
        times = []
    fields = out.get("fields", list(FIELDS))
    if not isinstance(fields, list) or not fields:
        col.add("output.fields", "expected a non-empty list")
        fields = list(FIELDS)
    return OutputSpec(every, tuple(float(t) for t in times), tuple(fields))


# --------------------------------------------------------------------------- #
# Validation                                                                   #
# --------------------------------------------------------------------------- #


def validate(cfg):
    """All semantic problems of ``cfg`` as ``path: message`` strings."""
    col = _Collector()
    g_ok = cfg.g > 0 and math.isfinite(cfg.g)
    if not g_ok:
        col.add("physics.g", f"must be positive, got {cfg.g!r}")
    if cfg.junction_model not in JUNCTION_MODELS:
        col.add("physics.junction_model",
                f"must be one of {', '.join(JUNCTION_MODELS)}, got {cfg.junction_model!r}")

    names = [c.name for c in cfg.canals]
    for i, c in enumerate(cfg.canals):
        path = f"geometry.canals[{i}]"
        if names.count(c.name) > 1:
            col.add(f"{path}.name", f"duplicate canal {c.name!r}")
        if not c.length > 0:
            col.add(f"{path}.length", f"must be positive, got {c.length!r}")
        if c.cells < 2:
            col.add(f"{path}.cells", f"at least 2 cells required, got {c.cells!r}")
        if not c.half_width > 0:
            col.add(f"{path}.half_width", f"must be positive, got {c.half_width!r}")

    ends = {}
    for i, j in enumerate(cfg.junctions):
        path = f"geometry.junctions[{i}]"
        roles = [(j.incoming, "end"), (j.outgoing[0], "start"), (j.outgoing[1], "start")]
        unknown = [n for n, _ in roles if n not in names]
        if unknown:
            col.add(path, f"unknown canals {unknown}")
            continue
        if len({n for n, _ in roles}) != 3:
            col.add(path, "the three canals must be distinct")
            continue
        for key in roles:
            if key in ends:
                col.add(path, f"canal {key[0]!r} {key[1]} already used by junction {ends[key]!r}")
            ends[key] = j.name
        widths = [cfg.canal(n).half_width for n, _ in roles]
        if not all(w > 0 for w in widths):
            continue
        try:
            build(JunctionShape(j.theta, j.phi, *widths))
        except SWJunctionError as exc:
            col.add(path, str(exc))

    initial = dict(cfg.initial)
    for name in names:
        if name not in initial:
            col.add(f"initial.{name}", "missing initial data")
    for name, segs in cfg.initial:
        path = f"initial.{name}"
        if name not in names:
            col.add(path, "unknown canal")
            continue
        if not segs:
            col.add(path, "no segments")
            continue
        if segs[-1].until is not None:
            col.add(f"{path}[{len(segs) - 1}].until", "the last segment must not set 'until'")
        for k, seg in enumerate(segs):
            if not seg.h > 0:
                col.add(f"{path}[{k}].h", f"must be positive, got {seg.h!r}")
            elif g_ok and not abs(seg.v) < math.sqrt(cfg.g * seg.h):
                col.add(f"{path}[{k}]", f"supercritical initial state (h={seg.h!r}, v={seg.v!r})")
            if k and seg.until is not None and segs[k - 1].until is not None \
                    and seg.until <= segs[k - 1].until:
                col.add(f"{path}[{k}].until", "breakpoints must increase")

    if cfg.time is None:
        col.add("time", "missing")
    else:
        if not (cfg.time.t_end >= 0 and math.isfinite(cfg.time.t_end)):
            col.add("time.t_end", f"must be nonnegative, got {cfg.time.t_end!r}")
        if not 0 < cfg.time.cfl <= 1:
            col.add("time.cfl", f"must lie in (0, 1], got {cfg.time.cfl!r}")
        if cfg.time.max_steps < 0:
            col.add("time.max_steps", "must be nonnegative")

    out = cfg.output
    if out.every is not None and out.every < 1:
        col.add("output.every", "must be a positive step count")
    bad = [f for f in out.fields if f not in FIELDS]
    if bad:
        col.add("output.fields", f"unknown fields {bad}; choose from {list(FIELDS)}")
    if any(t < 0 for t in out.times):
        col.add("output.times", "must be nonnegative")
    return col.errors


# --------------------------------------------------------------------------- #
# Rendering                                                                    #
# --------------------------------------------------------------------------- #


def to_dict(cfg):
    """Plain-data form of ``cfg``; floats survive a text round trip exactly."""
    return {
        "name": cfg.name,
        "geometry": {
            "canals": [
                {"name": c.name, "length": c.length, "cells": c.cells, "half_width": c.half_width}
                for c in cfg.canals
            ],
            "junctions": [
                {"name": j.name, "theta": j.theta, "phi": j.phi,
                 "incoming": j.incoming, "outgoing": list(j.outgoing)}
                for j in cfg.junctions
            ],
        },
        "physics": {"g": cfg.g, "junction_model": cfg.junction_model},
        "initial": {
            name: [_segment_dict(s) for s in segs] for name, segs in cfg.initial
        },
        "time": {"t_end": cfg.time.t_end, "cfl": cfg.time.cfl, "max_steps": cfg.time.max_steps},
        "output": {"every": cfg.output.every, "times": list(cfg.output.times),
                   "fields": list(cfg.output.fields)},
    }


def _segment_dict(seg):
    out = {"h": seg.h, "v": seg.v}
    if seg.until is not None:
        out["until"] = seg.until
    return out


def render(cfg):
    """YAML text that :func:`parse_config` reads back to an equal config."""
    # PyYAML writes floats with repr(), which round-trips doubles exactly
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=None)


# --------------------------------------------------------------------------- #
# Network construction                                                         #
# --------------------------------------------------------------------------- #


def initial_arrays(spec, segments):
    """Cell arrays ``(h, q)`` for canal ``spec`` from its segments."""
    x = (np.arange(spec.cells) + 0.5) * spec.dx
    h = np.empty(spec.cells)
    v = np.empty(spec.cells)
    todo = np.ones(spec.cells, dtype=bool)
    for seg in segments:
        sel = todo if seg.until is None else todo & (x <= seg.until)
        h[sel] = seg.h
        v[sel] = seg.v
        todo &= ~sel
    return h, h * v


def build_network(cfg):
    """Fresh :class:`NetworkState` at ``t = 0`` for ``cfg``."""
    state = NetworkState()
    for spec in cfg.canals:
        h, q = initial_arrays(spec, cfg.segments(spec.name))
        state.add_canal(Canal(spec.name, spec.length, spec.half_width, h, q))
    for j in cfg.junctions:
        state.add_junction(j.name, j.theta, j.phi, j.incoming, j.outgoing, cfg.junction_model)
    return state


def time_controls(cfg):
    return TimeControls(cfg.time.t_end, cfg.time.cfl, cfg.time.max_steps)


def cadence(cfg):
    return Cadence(cfg.output.every, cfg.output.times)


# --------------------------------------------------------------------------- #
# Presets                                                                      #
# --------------------------------------------------------------------------- #

PI = math.pi


def _three_canals(length, cells, widths):
    return tuple(CanalSpec(n, float(length), int(cells), float(s))
                 for n, s in zip(("c1", "c2", "c3"), widths))


def _dam(length):
    return (Segment(1.5, 0.0, 0.5 * length), Segment(1.0, 0.0))


def _still():
    return (Segment(1.0, 0.0),)


def junction_scenario(name, theta, phi, widths=(1.0, 1.0, 1.0), length=5.0, cells=500,
                      t_end=0.5, merging=False, model="momentum", cfl=0.9, times=None):
    """One incoming canal ``c1`` and outgoing ``c2``, ``c3`` at junction ``J``.

    The dam break sits on the far half of ``c1``; with ``merging`` a second
    one sits on the half of ``c3`` next to the junction, so water reaches
    ``c2`` from both sides.
    """
    initial = (("c1", _dam(length)), ("c2", _still()), ("c3", _dam(length) if merging else _still()))
    return ScenarioConfig(
        name, _three_canals(length, cells, widths),
        (JunctionSpec("J", float(theta), float(phi), "c1", ("c2", "c3")),),
        initial, TimeSpec(float(t_end), cfl), G_DEFAULT, model,
        OutputSpec(None, (float(t_end),) if times is None else tuple(times)),
    )


def single_canal_scenario(name, length, cells, t_end, dam_at, half_width=1.0, cfl=0.9):
    """One canal with a dam break at ``dam_at``, no junction."""
    return ScenarioConfig(
        name, (CanalSpec("c", float(length), int(cells), float(half_width)),), (),
        (("c", (Segment(1.5, 0.0, float(dam_at)), Segment(1.0, 0.0))),),
        TimeSpec(float(t_end), cfl), G_DEFAULT, "momentum", OutputSpec(None, (float(t_end),)),
    )


TEST72_THETAS = {0: 0.0, 1: PI / 12, 2: PI / 6, 3: PI / 3}
TEST72_ASYM_PHIS = {1: -PI / 8, 2: -PI / 4, 3: -3 * PI / 8}
TEST72_WIDTHS = ("0.5", "1", "1.5", "2")
TEST73_PHIS = {0: -PI / 3, 1: -PI / 6, 2: -PI / 12, 3: 0.0}


def _preset_table():
    table = {
        "test71": lambda: junction_scenario("test71", PI / 6, -PI / 6, length=3.5, cells=96, t_end=0.9),
        "test74-diverge": lambda: junction_scenario("test74-diverge", PI / 3, -PI / 12, t_end=1.5),
        "test74-merge": lambda: junction_scenario("test74-merge", 5 * PI / 12, -3 * PI / 8,
                                                  t_end=1.5, merging=True),
    }
    for k, th in TEST72_THETAS.items():
        table[f"test72-theta{k}"] = (lambda k=k, th=th: junction_scenario(
            f"test72-theta{k}", th, -th, widths=(1.0, 0.5, 0.5)))
    for k, ph in TEST72_ASYM_PHIS.items():
        table[f"test72-asym-phi{k}"] = (lambda k=k, ph=ph: junction_scenario(
            f"test72-asym-phi{k}", PI / 8, ph, widths=(1.0, 0.5, 0.5)))
    for w in TEST72_WIDTHS:
        table[f"test72-width-s3={w}"] = (lambda w=w: junction_scenario(
            f"test72-width-s3={w}", PI / 4, -PI / 4, widths=(1.0, 1.0, float(w))))
    for k, ph in TEST73_PHIS.items():
        table[f"test73-phi{k}"] = (lambda k=k, ph=ph: junction_scenario(
            f"test73-phi{k}", PI / 3, ph, merging=True))
    return table


_PRESETS = _preset_table()

PRESET_DESCRIPTIONS = {
    "test71": "grid convergence, s=1, theta=-phi=pi/6, L=3.5, N=96, T=0.9",
    "test74-diverge": "diverging junction, s=1, theta=pi/3, phi=-pi/12, L=5, T=1.5",
    "test74-merge": "merging junction, s=1, theta=5pi/12, phi=-3pi/8, L=5, T=1.5",
    **{f"test72-theta{k}": f"symmetric angles theta=-phi={v}, s=(1,1/2,1/2), L=5, T=0.5"
       for k, v in zip(TEST72_THETAS, ("0", "pi/12", "pi/6", "pi/3"))},
    **{f"test72-asym-phi{k}": f"theta=pi/8, phi={v}, s=(1,1/2,1/2), L=5, T=0.5"
       for k, v in zip(TEST72_ASYM_PHIS, ("-pi/8", "-pi/4", "-3pi/8"))},
    **{f"test72-width-s3={w}": f"theta=-phi=pi/4, s1=s2=1, s3={w}, L=5, T=0.5"
       for w in TEST72_WIDTHS},
    **{f"test73-phi{k}": f"merging, s=1, theta=pi/3, phi={v}, L=5, T=0.5"
       for k, v in zip(TEST73_PHIS, ("-pi/3", "-pi/6", "-pi/12", "0"))},
}


def preset_names():
    return list(_PRESETS)


def preset(name):
    """Config for a named preset."""
    try:
        return _PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(_PRESETS)}") from None


def load(source):
    """Config from a preset name or a path to a scenario document."""
    if source in _PRESETS:
        return preset(source)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{source}: not a preset and not a readable file ({exc.strerror})") from exc
    return parse_config(text)
