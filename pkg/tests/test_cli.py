import io
import json
import math

import pytest

from swjunction import junction as J
from swjunction import scenarios as S
from swjunction.cli import main
from swjunction.exceptions import NoConvergenceError

PI = math.pi


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def small_doc(tmp_path):
    cfg = S.junction_scenario("small", PI / 6, -PI / 6, length=1.0, cells=20, t_end=0.2,
                              times=(0.1, 0.2))
    path = tmp_path / "small.yaml"
    path.write_text(S.render(cfg))
    return str(path)


def test_presets_list():
    code, out, _ = _cli("presets", "list")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == len(S.preset_names())
    assert lines[0].split("\t")[0] == S.preset_names()[0]


def test_validate(small_doc, tmp_path):
    code, out, _ = _cli("validate", small_doc)
    assert code == 0 and "small: ok" in out
    bad = tmp_path / "bad.yaml"
    bad.write_text("geometry: {}\n")
    code, _, err = _cli("validate", str(bad))
    assert code == 1
    assert "missing required sections: initial, time" in err
    assert "geometry.canals" in err


def test_validate_missing_file(tmp_path):
    code, _, err = _cli("validate", str(tmp_path / "nope.yaml"))
    assert code == 1 and "not a preset" in err


def test_run_and_compare(small_doc, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert _cli("run", small_doc, "--out", a)[0] == 0
    assert _cli("run", small_doc, "--out", b)[0] == 0
    code, out, _ = _cli("compare", a, b, "--norms", "l1,linf")
    assert code == 0
    assert out.splitlines()[0] == "canal,t,field,l1,linf"
    assert out.splitlines()[-1] == "max l1=0.000000e+00 linf=0.000000e+00"
    code, out, _ = _cli("compare", a, b, "--json")
    assert code == 0 and all(e["linf"] == 0.0 for e in json.loads(out))


def test_run_overrides(small_doc, tmp_path):
    out_dir = tmp_path / "e"
    code, _, _ = _cli("run", small_doc, "--out", str(out_dir), "--cells", "10", "--cfl", "0.5",
                      "--junction", "energy")
    assert code == 0
    man = json.loads((out_dir / "manifest.json").read_text())
    assert man["cfl"] == 0.5 and man["junction_model"] == "energy"
    assert man["config"]["geometry"]["canals"][0]["cells"] == 10


def test_compare_errors(small_doc, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    _cli("run", small_doc, "--out", a)
    _cli("run", small_doc, "--out", b, "--cells", "10")
    code, _, err = _cli("compare", a, b)
    assert code == 1 and "interpolation" in err
    assert _cli("compare", a, b, "--interpolate")[0] == 0
    assert _cli("compare", a)[0] == 1
    assert _cli("compare", a, str(tmp_path / "missing"))[0] == 1
    assert _cli("compare", a, b, "--norms", "l7")[0] == 1


def test_refinement_ladder(small_doc, tmp_path):
    dirs = []
    for n in (10, 20, 40):
        d = str(tmp_path / f"n{n}")
        _cli("run", small_doc, "--out", d, "--cells", str(n))
        dirs.append(d)
    code, out, _ = _cli("compare", *dirs)
    assert code == 0
    assert "cells [10, 20, 40]" in out and "smooth cells" in out


def test_bad_arguments():
    assert _cli()[0] == 1
    assert _cli("run")[0] == 1
    assert _cli("run", "test71", "--junction", "x")[0] == 1


def test_simulation_failure_exit_code(small_doc, tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise NoConvergenceError("forced")

    monkeypatch.setattr(J, "solve", broken)
    out_dir = tmp_path / "f"
    code, out, _ = _cli("run", small_doc, "--out", str(out_dir))
    assert code == 2 and "simulation failed" in out
    man = json.loads((out_dir / "manifest.json").read_text())
    assert man["status"] == "failed" and man["failure"]["junction"] == "J"
