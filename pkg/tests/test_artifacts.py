import math
import os

import numpy as np
import pytest

from swjunction import junction as J
from swjunction import scenarios as S
from swjunction.artifacts import (
    CanalTable,
    IncompatibleRunsError,
    RunArtifacts,
    cell_weights,
    compare_runs,
    max_norms,
    norm_values,
    observed_orders,
    read_run,
    refinement_study,
    restrict,
    run_scenario,
    self_differences,
    smooth_mask,
    synthetic_sample,
    write_run,
)
from swjunction.exceptions import NoConvergenceError

PI = math.pi


def _small(name="small", cells=20, t_end=0.2, model="momentum", times=(0.1, 0.2)):
    return S.junction_scenario(name, PI / 6, -PI / 6, length=1.0, cells=cells, t_end=t_end,
                               model=model, times=times)


@pytest.fixture(scope="module")
def small_run():
    return run_scenario(_small())


# --------------------------------------------------------------------------- #
# Running and files                                                            #
# --------------------------------------------------------------------------- #


def test_run_produces_tables_log_and_manifest(small_run):
    arts = small_run
    assert arts.ok and set(arts.tables) == {"c1", "c2", "c3"}
    table = arts.tables["c1"]
    assert table.columns == ("t", "x", "h", "q", "v")
    np.testing.assert_array_equal(table.times, [0.0, 0.1, 0.2])
    assert table.at(0.1).data.shape == (20, 5)
    man = arts.manifest
    for key in ("name", "version", "config", "g", "cfl", "junction_model", "tolerances",
                "steps", "t_final", "output_times", "timings"):
        assert key in man
    assert man["t_final"] == 0.2 and man["failure"] is None
    assert man["tolerances"]["newton_tol"] > 0 and man["tolerances"]["riemann_tol"] > 0
    assert len(arts.junction_log) == man["steps"]
    step, t, name, *x, iters, res, det = arts.junction_log[-1]
    assert name == "J" and t == 0.2 and len(x) == 6 and res <= 1e-12 and det != 0


def test_manifest_config_reruns_identically(small_run):
    cfg = S.parse_config(S.render(_small()))
    again = run_scenario(cfg)
    assert S.to_dict(cfg) == small_run.manifest["config"]
    for name in small_run.tables:
        np.testing.assert_array_equal(again.tables[name].data, small_run.tables[name].data)


def test_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_scenario(_small(), str(a))
    run_scenario(_small(), str(b))
    names = sorted(f for f in os.listdir(a) if f.endswith(".csv"))
    assert names == ["canal_c1.csv", "canal_c2.csv", "canal_c3.csv", "junctions.csv"]
    for f in names:
        assert (a / f).read_bytes() == (b / f).read_bytes()
    assert (a / "canal_c1.csv").read_text().splitlines()[0] == "t,x,h,q,v"


def test_files_round_trip(tmp_path, small_run):
    write_run(small_run, str(tmp_path))
    back = read_run(str(tmp_path))
    for name, table in small_run.tables.items():
        assert back.tables[name].columns == table.columns
        np.testing.assert_array_equal(back.tables[name].data, table.data)
    assert back.junction_log == small_run.junction_log
    assert back.manifest == small_run.manifest


def test_selected_fields_only():
    cfg = _small()
    cfg = S.ScenarioConfig(cfg.name, cfg.canals, cfg.junctions, cfg.initial, cfg.time, cfg.g,
                           cfg.junction_model, S.OutputSpec(None, (0.2,), ("h",)))
    arts = run_scenario(cfg)
    assert arts.tables["c2"].columns == ("t", "x", "h")


def test_failure_is_recorded(tmp_path, monkeypatch):
    real = J.solve
    calls = [0]

    def flaky(*args, **kwargs):
        calls[0] += 1
        if calls[0] > 3:
            raise NoConvergenceError("forced")
        return real(*args, **kwargs)

    monkeypatch.setattr(J, "solve", flaky)
    arts = run_scenario(_small(), str(tmp_path))
    assert not arts.ok
    fail = arts.manifest["failure"]
    assert fail["junction"] == "J" and fail["step"] == 3 and len(fail["trace"]) == 6
    assert "forced" in fail["message"]
    # partial output: initial state and the last good state
    np.testing.assert_array_equal(arts.tables["c1"].times[0], 0.0)
    assert len(arts.junction_log) == 3
    assert read_run(str(tmp_path)).manifest["status"] == "failed"


# --------------------------------------------------------------------------- #
# Comparison                                                                   #
# --------------------------------------------------------------------------- #


def test_identical_runs_have_zero_norms(small_run):
    report = compare_runs(small_run, small_run)
    assert {e["field"] for e in report} == {"h", "q", "v"}
    assert len(report) == 3 * 3 * 3
    assert max_norms(report) == {"l1": 0.0, "l2": 0.0, "linf": 0.0}


def test_norm_values():
    d = np.array([1.0, -2.0, 0.5])
    w = np.array([0.5, 0.25, 0.25])
    out = norm_values(d, w)
    assert out["l1"] == pytest.approx(0.5 + 0.5 + 0.125)
    assert out["l2"] == pytest.approx(math.sqrt(0.5 + 1.0 + 0.0625))
    assert out["linf"] == 2.0
    with pytest.raises(ValueError):
        norm_values(d, w, ("l3",))
    np.testing.assert_allclose(cell_weights([0.25, 0.75, 1.25]), [0.5, 0.5, 0.5])


def test_grid_mismatch_needs_interpolation(small_run):
    fine = run_scenario(_small(cells=40))
    with pytest.raises(IncompatibleRunsError, match="interpolation"):
        compare_runs(small_run, fine)
    report = compare_runs(small_run, fine, interpolate=True)
    worst = max_norms(report)
    assert 0 < worst["linf"] < 0.2


def test_interpolation_is_exact_for_linear_profiles():
    xa = np.array([0.25, 0.75, 1.25])
    xb = np.array([0.0, 0.5, 1.0, 1.5])
    a = RunArtifacts({"c": CanalTable(("t", "x", "h"), np.column_stack([np.zeros(3), xa, 2 * xa + 1]))})
    b = RunArtifacts({"c": CanalTable(("t", "x", "h"), np.column_stack([np.zeros(4), xb, 2 * xb + 1]))})
    report = compare_runs(a, b, interpolate=True)
    assert max_norms(report)["linf"] <= 1e-15


def test_incompatible_runs(small_run):
    other = RunArtifacts({"zz": small_run.tables["c1"]})
    with pytest.raises(IncompatibleRunsError, match="no canal"):
        compare_runs(small_run, other)
    shifted = CanalTable(small_run.tables["c1"].columns, small_run.tables["c1"].data.copy())
    shifted.data[:, 0] += 5.0
    with pytest.raises(IncompatibleRunsError, match="common output times"):
        compare_runs(small_run, RunArtifacts({"c1": shifted}))


def test_momentum_and_energy_agree_on_orthogonal_shape():
    kw = dict(length=1.0, cells=20, t_end=0.3)
    a = run_scenario(S.junction_scenario("m", PI / 3, -PI / 3, **kw))
    b = run_scenario(S.junction_scenario("e", PI / 3, -PI / 3, model="energy", **kw))
    assert max_norms(compare_runs(a, b))["linf"] <= 1e-8


def test_synthetic_sample_overlay_has_zero_norms(tmp_path, small_run):
    sample = synthetic_sample(small_run, {"c1": 0.0, "c2": -PI / 6, "c3": PI / 6})
    write_run(sample, str(tmp_path))
    back = read_run(str(tmp_path))
    assert back.tables["c2"].columns == ("t", "x", "h", "vx", "vy")
    report = compare_runs(small_run, back)
    assert {e["field"] for e in report} == {"h", "speed"}
    assert max_norms(report) == {"l1": 0.0, "l2": 0.0, "linf": 0.0}


# --------------------------------------------------------------------------- #
# Refinement studies                                                           #
# --------------------------------------------------------------------------- #


def test_restrict_and_orders():
    np.testing.assert_array_equal(restrict([1.0, 3.0, 5.0, 7.0], 2), [2.0, 6.0])
    with pytest.raises(ValueError):
        restrict([1.0, 2.0, 3.0], 2)
    np.testing.assert_allclose(observed_orders([0.4, 0.2, 0.1]), [1.0, 1.0])


def test_self_differences_of_exact_first_order_error():
    # profiles u_N = f + c dx on uniform grids; successive differences halve
    lengths = {"c": 1.0}
    profiles = []
    for n in (8, 16, 32):
        x = (np.arange(n) + 0.5) / n
        profiles.append({"c": 2.0 * x + 1.0 / n})
    diffs = self_differences(profiles, lengths)
    np.testing.assert_allclose(observed_orders(diffs), [1.0], rtol=1e-12)


def test_smooth_mask_excludes_jump():
    fine = np.where(np.arange(40) < 20, 1.5, 1.0)
    mask = smooth_mask(fine, 10, 0.025)
    assert mask.tolist() == [True] * 4 + [False] * 2 + [True] * 4


def test_refinement_study_on_small_ladder():
    runs = [run_scenario(_small(cells=n, times=(0.2,))) for n in (10, 20, 40)]
    study = refinement_study(runs)
    assert study["cells"] == [10, 20, 40] and study["t"] == 0.2
    assert len(study["differences"]) == 2 and len(study["orders"]) == 1
    assert study["differences"][1] < study["differences"][0]
    with pytest.raises(ValueError):
        refinement_study(runs[:2])
