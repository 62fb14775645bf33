import math
from dataclasses import replace

import numpy as np
import pytest

from swjunction import scenarios as S
from swjunction.artifacts import run_scenario
from swjunction.exceptions import ConfigError

PI = math.pi

DOC = """\
name: demo
geometry:
  canals:
    - {name: a, length: 2.0, cells: 20, half_width: 1.0}
    - {name: b, length: 2.0, cells: 20, half_width: 0.5}
    - {name: c, length: 2.0, cells: 20, half_width: 0.5}
  junctions:
    - {name: J, theta: pi/6, phi: -pi/6, incoming: a, outgoing: [b, c]}
physics: {g: 9.81, junction_model: energy}
initial:
  a: [{until: 1.0, h: 1.5, v: 0.0}, {h: 1.0}]
  b: [{h: 1.0, v: 0.1}]
  c: {h: 1.0}
time: {t_end: 0.2, cfl: 0.8}
output: {every: 5, times: [0.1], fields: [h, v]}
"""


def _errors(text):
    with pytest.raises(ConfigError) as info:
        S.parse_config(text)
    return info.value.errors


# --------------------------------------------------------------------------- #
# Parsing                                                                      #
# --------------------------------------------------------------------------- #


def test_parse_document():
    cfg = S.parse_config(DOC)
    assert cfg.name == "demo" and cfg.junction_model == "energy"
    assert [c.name for c in cfg.canals] == ["a", "b", "c"]
    j = cfg.junctions[0]
    assert j.theta == pytest.approx(PI / 6) and j.phi == pytest.approx(-PI / 6)
    assert cfg.segments("a") == (S.Segment(1.5, 0.0, 1.0), S.Segment(1.0, 0.0))
    assert cfg.segments("c") == (S.Segment(1.0, 0.0),)
    assert cfg.time == S.TimeSpec(0.2, 0.8)
    assert cfg.output == S.OutputSpec(5, (0.1,), ("h", "v"))


@pytest.mark.parametrize("text,value", [
    ("pi", PI), ("-pi/6", -PI / 6), ("3*pi/8", 3 * PI / 8), (" - 5 * pi / 12", -5 * PI / 12),
    ("0.25", 0.25), (0.5, 0.5), (0, 0.0),
])
def test_parse_angle(text, value):
    assert S.parse_angle(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("bad", ["pie", "pi/", True, None, "2pi"])
def test_parse_angle_rejects(bad):
    with pytest.raises(ValueError):
        S.parse_angle(bad)


def test_exponent_without_dot_is_a_number():
    cfg = S.parse_config(DOC.replace("t_end: 0.2", "t_end: 2e-1"))
    assert cfg.time.t_end == 0.2


def test_empty_document_lists_required_sections():
    assert _errors("") == ["document: missing required sections: geometry, initial, time"]


def test_syntax_error_has_line_and_column():
    errs = _errors("geometry:\n  canals: [a, b\ntime: {}\n")
    assert len(errs) == 1 and "line 3" in errs[0] and "column" in errs[0]


def test_all_errors_are_reported_with_paths():
    text = (DOC.replace("half_width: 0.5}", "half_width: -0.5}", 1)
            .replace("{h: 1.0, v: 0.1}", "{h: 1.0, v: 5.0}")
            .replace("cfl: 0.8", "cfl: 1.5"))
    errs = _errors(text)
    joined = "\n".join(errs)
    assert "geometry.canals[1].half_width: must be positive" in joined
    assert "initial.b[0]: supercritical initial state" in joined
    assert "time.cfl" in joined
    assert len(errs) >= 3


def test_theta_zero_width_invariant_is_named():
    text = DOC.replace("theta: pi/6", "theta: 0").replace("{name: c, length: 2.0, cells: 20, half_width: 0.5}",
                                                          "{name: c, length: 2.0, cells: 20, half_width: 0.7}")
    errs = _errors(text)
    assert any(e.startswith("geometry.junctions[0]") and "s1" in e and "s3" in e for e in errs)


def test_degenerate_triangle_is_reported():
    text = DOC.replace("theta: pi/6, phi: -pi/6", "theta: 0.1, phi: -0.1").replace(
        "half_width: 1.0}", "half_width: 3.0}")
    errs = _errors(text)
    assert any(e.startswith("geometry.junctions[0]") and "inverted" in e for e in errs)


@pytest.mark.parametrize("edit,path", [
    (("  c: {h: 1.0}\n", ""), "initial.c: missing initial data"),
    (("incoming: a", "incoming: z"), "geometry.junctions[0]: unknown canals"),
    (("junction_model: energy", "junction_model: fancy"), "physics.junction_model"),
    (("{h: 1.0}]", "{h: 1.0, until: 2.0}]"), "initial.a[1].until"),
    (("until: 1.0, h: 1.5", "until: 1.0, h: -1.5"), "initial.a[0].h"),
    (("cells: 20, half_width: 1.0", "cells: 1, half_width: 1.0"), "geometry.canals[0].cells"),
    (("fields: [h, v]", "fields: [h, w]"), "output.fields"),
    (("name: demo", "name: demo\nextra: 1"), "document.extra: unknown key"),
    (("g: 9.81", "g: -1"), "physics.g"),
    (("name: b,", "name: a,"), "duplicate canal"),
])
def test_semantic_errors(edit, path):
    errs = _errors(DOC.replace(*edit))
    assert any(path in e for e in errs), errs


def test_initial_arrays_follow_segments():
    spec = S.CanalSpec("a", 2.0, 4, 1.0)
    h, q = S.initial_arrays(spec, (S.Segment(2.0, 0.5, 0.5), S.Segment(1.5, 0.0, 1.25),
                                   S.Segment(1.0, 0.1)))
    np.testing.assert_array_equal(h, [2.0, 1.5, 1.5, 1.0])
    np.testing.assert_array_equal(q, [1.0, 0.0, 0.0, 0.1])


# --------------------------------------------------------------------------- #
# Presets and rendering                                                        #
# --------------------------------------------------------------------------- #


def test_preset_names():
    names = S.preset_names()
    assert "test71" in names and "test74-diverge" in names and "test74-merge" in names
    assert [n for n in names if n.startswith("test72-theta")] == [f"test72-theta{k}" for k in range(4)]
    assert sum(n.startswith("test72-asym") for n in names) == 3
    assert sum(n.startswith("test72-width") for n in names) == 4
    assert sum(n.startswith("test73") for n in names) == 4
    assert set(S.PRESET_DESCRIPTIONS) == set(names)
    with pytest.raises(KeyError):
        S.preset("test99")


def test_test71_preset_expands():
    cfg = S.preset("test71")
    assert all(c.half_width == 1.0 and c.length == 3.5 for c in cfg.canals)
    j = cfg.junctions[0]
    assert j.theta == PI / 6 and j.phi == -PI / 6 and j.incoming == "c1"
    assert cfg.segments("c1") == (S.Segment(1.5, 0.0, 1.75), S.Segment(1.0, 0.0))
    assert cfg.segments("c2") == cfg.segments("c3") == (S.Segment(1.0, 0.0),)
    assert cfg.time.t_end == 0.9


def test_test73_preset_has_two_dam_breaks():
    cfg = S.preset("test73-phi2")
    assert cfg.junctions[0].phi == -PI / 12
    assert cfg.segments("c3") == cfg.segments("c1")
    assert cfg.segments("c2") == (S.Segment(1.0, 0.0),)


@pytest.mark.parametrize("name", S.preset_names())
def test_presets_round_trip(name):
    cfg = S.preset(name)
    assert S.validate(cfg) == []
    assert S.parse_config(S.render(cfg)) == cfg


def test_document_round_trip():
    cfg = S.parse_config(DOC)
    assert S.parse_config(S.render(cfg)) == cfg


def test_overrides_are_validated():
    cfg = S.preset("test71").with_overrides(cfl=0.5, cells=12, junction_model="energy", t_end=0.3)
    assert cfg.time.cfl == 0.5 and cfg.time.t_end == 0.3 and cfg.junction_model == "energy"
    assert all(c.cells == 12 for c in cfg.canals)
    with pytest.raises(ConfigError):
        S.preset("test71").with_overrides(cells=1)
    with pytest.raises(ConfigError):
        S.preset("test71").with_overrides(junction_model="x")


def test_load_preset_or_file(tmp_path):
    assert S.load("test71") == S.preset("test71")
    path = tmp_path / "demo.yaml"
    path.write_text(DOC)
    assert S.load(str(path)).name == "demo"
    with pytest.raises(ConfigError, match="not a preset"):
        S.load(str(tmp_path / "missing.yaml"))


def test_build_network_matches_config():
    cfg = S.parse_config(DOC)
    state = S.build_network(cfg)
    assert set(state.canals) == {"a", "b", "c"}
    assert state.junctions["J"].model == "energy"
    np.testing.assert_allclose(state.canals["b"].q, 0.1)
    assert S.time_controls(cfg).cfl == 0.8
    assert S.cadence(cfg).every == 5


# --------------------------------------------------------------------------- #
# Qualitative trends once the shock has reached the junction                   #
# --------------------------------------------------------------------------- #

# The dam-break shock starts 2.5 m from the junction and needs about 0.68 s
# to reach it, so these runs go to t = 1.0 on a coarser grid.


def _late(name, cells=100, t_end=1.0):
    cfg = S.preset(name).with_overrides(cells=cells, t_end=t_end)
    return run_scenario(replace(cfg, output=S.OutputSpec(None, (t_end,))))


def _junction_heights(arts):
    return np.array(arts.junction_log[-1][3:6], dtype=float)


def test_junction_height_decreases_with_symmetric_angle():
    h1 = [_junction_heights(_late(f"test72-theta{k}"))[0] for k in range(4)]
    assert np.all(np.diff(h1) < 0)


def test_asymmetric_angle_shifts_water_between_outgoing_canals():
    near2, near3 = [], []
    for k in (1, 2, 3):
        arts = _late(f"test72-asym-phi{k}")
        near2.append(arts.tables["c2"].at(1.0).field("h")[:10].mean())
        near3.append(arts.tables["c3"].at(1.0).field("h")[:10].mean())
    assert np.all(np.diff(near2) < 0)
    assert np.all(np.diff(near3) > 0)


def test_width_study_trends():
    rows = np.array([_junction_heights(_late(f"test72-width-s3={w}")) for w in S.TEST72_WIDTHS])
    assert np.all(np.diff(rows[:, 0]) < 0)
    assert np.all(np.diff(rows[:, 2]) < 0)
    # canal 2 rises once canal 3 is at least as wide as canal 2
    assert np.all(np.diff(rows[1:, 1]) > 0)
