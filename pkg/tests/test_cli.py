import json
import os
import subprocess
import sys

import numpy as np
import pytest

from gaussent.cli import main
from gaussent.cmfile import parse_table, read_cm, read_transform, write_cm
from gaussent.coupling import CoupledStateParams, coupled_cm_squeezed_basis
from gaussent.entanglement import analyze
from gaussent.symplectic import apply, beam_splitter


@pytest.fixture
def files(tmp_path, untilted, tilted):
    paths = {}
    for name, g in [("untilted", untilted), ("tilted", tilted), ("vacuum", np.eye(4)),
                    ("bad", np.diag([0.5, 0.5, 1.0, 1.0])),
                    ("coupled", coupled_cm_squeezed_basis(CoupledStateParams(2.0, 0.4)))]:
        paths[name] = str(tmp_path / f"{name}.cmv")
        write_cm(paths[name], g)
    return paths


def _kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if line and not line.startswith("#"))


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys, files):
    code, out, _ = _run(capsys, "validate", files["untilted"])
    assert code == 0 and "physical=true" in out
    assert _run(capsys, "validate", files["vacuum"])[0] == 0
    code, out, _ = _run(capsys, "validate", files["bad"])
    assert code == 2
    assert float(_kv(out)["min_eigenvalue"]) == pytest.approx(-0.5)


def test_validate_malformed(capsys, tmp_path):
    p = tmp_path / "m.cmv"
    p.write_text("cmv1 2\n1 0 0 0\n0 1 0\n")
    code, _, err = _run(capsys, "validate", p)
    assert code == 1 and "line 3" in err
    assert _run(capsys, "validate", tmp_path / "missing.cmv")[0] == 1


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["analyze", "x.cmv", "--basis", "sideways"])
    assert info.value.code == 1


def test_analyze_text(capsys, files):
    code, out, _ = _run(capsys, "analyze", files["untilted"], "--basis", "rotate-45")
    kv = _kv(out)
    assert code == 0
    assert float(kv["report.log_negativity"]) == pytest.approx(1.60, abs=0.01)
    assert "# basis: rotate-45" in out and "# command: analyze" in out
    assert float(kv["variances_db"].split(",")[0]) == pytest.approx(10 * np.log10(4.135))


def test_analyze_json(capsys, files):
    code, out, _ = _run(capsys, "analyze", files["tilted"], "--basis", "rotate-45", "--format", "json")
    doc = json.loads(out)
    assert doc["config"]["basis"] == "rotate-45"
    assert doc["report"]["log_negativity"] == pytest.approx(1.13, abs=0.02)
    code, out, _ = _run(capsys, "analyze", files["vacuum"], "--format", "json")
    assert json.loads(out)["report"]["separable"] is True


def test_analyze_unphysical(capsys, files):
    code, _, err = _run(capsys, "analyze", files["bad"])
    assert code == 2 and "unphysical" in err


def test_standard_form(capsys, files, tmp_path):
    out_path = tmp_path / "sf.cmv"
    code, out, _ = _run(capsys, "standard-form", files["untilted"], "--basis", "rotate-45", "-o", out_path)
    kv = _kv(out)
    assert code == 0
    assert float(kv["c_plus"]) == pytest.approx(3.805)
    assert float(kv["c_minus"]) == pytest.approx(-3.805)
    assert read_cm(out_path)[0, 0] == pytest.approx(4.135)


def test_optimize_tilted(capsys, files, tmp_path):
    cm_out, corr_out = tmp_path / "c.cmv", tmp_path / "c.smv"
    code, out, _ = _run(capsys, "optimize", files["tilted"], "--basis", "rotate-45",
                        "-o", cm_out, "--correction", corr_out)
    kv = _kv(out)
    assert code == 0
    assert float(kv["before.log_negativity"]) == pytest.approx(1.13, abs=0.02)
    assert float(kv["after.log_negativity"]) == pytest.approx(1.32, abs=0.01)
    # re-analysis of the written file reproduces the report exactly
    assert analyze(read_cm(cm_out)).log_negativity == float(kv["after.log_negativity"])
    s, plates = read_transform(corr_out)
    assert len(plates) == 4
    assert plates[0] == float(kv["waveplates_deg.quarter1"])
    g = apply(beam_splitter(np.pi / 4), read_cm(files["tilted"]))
    np.testing.assert_allclose(apply(s, g), read_cm(cm_out), atol=1e-9)


def test_optimize_coupled_family(capsys, files, tmp_path):
    code, out, _ = _run(capsys, "optimize", files["coupled"], "--basis", "rotate-45",
                        "-o", tmp_path / "x.cmv", "--correction", tmp_path / "x.smv")
    assert code == 0
    assert float(_kv(out)["after.log_negativity"]) == pytest.approx(1.0, abs=1e-9)


def test_optimize_default_paths(capsys, files):
    code, _, _ = _run(capsys, "optimize", files["untilted"], "--basis", "rotate-45")
    assert code == 0
    stem = os.path.splitext(files["untilted"])[0]
    assert os.path.exists(stem + ".corrected.cmv") and os.path.exists(stem + ".correction.smv")


def test_optimize_nonconverged_exit_3(capsys, files, tmp_path, monkeypatch):
    import gaussent.cli as cli
    from gaussent import passive

    def stalled(g, grid_steps=16):
        res = passive.optimize_passive(g, grid_steps=grid_steps, max_iter=1, n_starts=1)
        return passive.PassiveCorrection(**{**res.__dict__, "converged": False})

    monkeypatch.setattr(cli, "optimize_passive", stalled)
    out_path = tmp_path / "n.cmv"
    code, _, err = _run(capsys, "optimize", files["tilted"], "-o", out_path, "--correction", tmp_path / "n.smv")
    assert code == 3 and "best result written" in err
    assert out_path.exists()


def test_sweep_tilt_surface(capsys, tmp_path):
    out = tmp_path / "t.tsv"
    assert _run(capsys, "sweep", "tilt-surface", "-o", out)[0] == 0
    meta, cols, rows = parse_table(out.read_text())
    assert len(rows) == 101 * 101
    assert cols == ["a", "theta", "log_negativity"]
    assert meta["theta_min"] == "-90.0" and meta["theta_unit"] == "rad"
    assert float(rows[0][1]) == pytest.approx(-np.pi / 2)


def test_sweep_bad_grid(capsys):
    assert _run(capsys, "sweep", "tilt-surface", "--a-steps", "0")[0] == 1
    assert _run(capsys, "sweep", "sensitivity", "--deltas", "0,x")[0] == 1


def test_sweep_sensitivity(capsys, tmp_path):
    out = tmp_path / "s.tsv"
    assert _run(capsys, "sweep", "sensitivity", "-o", out)[0] == 0
    meta, cols, rows = parse_table(out.read_text())
    assert len({(r[0], r[1]) for r in rows}) == 6
    assert float(meta["first_unphysical off-diagonal-block"]) == pytest.approx(0.19, abs=0.02)
    code, text, _ = _run(capsys, "sweep", "sensitivity", "--deltas", "0")
    _, _, rows = parse_table(text)
    assert len(rows) == 6 and all(float(r[5]) == 0 for r in rows)


def test_simulate(capsys, files, tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    args = ["simulate", files["untilted"], "--samples", "1000000", "--seed", "5", "--phases", "16",
            "--samples-per-phase", "2000"]
    code, out, _ = _run(capsys, *args, "--out-dir", d1)
    assert code == 0
    assert float(_kv(out)["report.log_negativity"]) == pytest.approx(1.60, abs=0.05)
    _run(capsys, *args, "--out-dir", d2)
    for name in ("trace_mode1.tsv", "trace_mode2.tsv", "estimate.cmv"):
        strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("# out_dir")]
        assert strip(d1 / name) == strip(d2 / name)
    meta, cols, rows = parse_table((d1 / "trace_mode1.tsv").read_text())
    assert meta["seed"] == "5" and meta["rng"] == "PCG64" and len(rows) == 16
    read_cm(d1 / "estimate.cmv")


def test_simulate_vacuum_flat(capsys, files, tmp_path):
    _run(capsys, "simulate", files["vacuum"], "--samples", "1000", "--phases", "8",
         "--samples-per-phase", "100", "--out-dir", tmp_path)
    _, _, rows = parse_table((tmp_path / "trace_mode1.tsv").read_text())
    assert all(abs(float(r[4])) < 1e-12 for r in rows)


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "gaussent", "validate", files["vacuum"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "physical=true" in proc.stdout
