import json

import numpy as np
import pytest

from elastomode.cli import load_config, main
from elastomode.errors import ConfigError


def _csv(path):
    lines = path.read_text().splitlines()
    return lines[0], lines[1].split(","), [row.split(",") for row in lines[2:]]


def _column(path, name):
    _, cols, rows = _csv(path)
    j = cols.index(name)
    return np.array([float(r[j]) for r in rows])


def test_spectrum_table(tmp_path):
    out = tmp_path / "out"
    status = main(["spectrum", "--set", "spectrum.degrees=8,10", "--set", "spectrum.eig_degree=8", "--out", str(out)])
    assert status == 0
    header, cols, rows = _csv(out / "spectrum_eigen.csv")
    assert header.startswith("# elastomode spectrum config=")
    t1 = [r for r in rows if r[0] == "T" and r[1] == "1"][0]
    assert float(t1[cols.index("closed_form")]) == 0.5
    assert abs(float(t1[cols.index("nearest_eigenvalue")]) - 0.5) < 1e-10
    assert _column(out / "spectrum_convergence.csv", "max_rel_err").max() < 1e-3
    meta = json.loads((out / "spectrum.json").read_text())
    assert meta["degrees"] == [8, 10]


def test_invalid_medium_writes_nothing(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["spectrum", "--set", "medium.lam=-1", "--out", str(out)]) == 2
    assert "3*lambda + 2*mu > 0 fails" in capsys.readouterr().err
    assert not out.exists()


def test_config_error_has_line_number(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[medium]\nlam = 1\nmu = one\n")
    with pytest.raises(ConfigError, match=r"run\.ini:3:"):
        load_config(str(cfg))


def test_malformed_override(tmp_path):
    assert main(["resonances", "--set", "nodot=1", "--out", str(tmp_path / "o")]) == 2
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(None, ["nosuch.key=1"])


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "absent.ini"))


def test_resonances_outputs(tmp_path):
    out = tmp_path / "out"
    assert main(["resonances", "--out", str(out)]) == 0
    header, cols, rows = _csv(out / "resonances_static.csv")
    assert cols == ["family", "n", "k", "case", "branch", "omega_re", "omega_im", "residual"]
    t2 = [r for r in rows if r[0] == "T" and r[1] == "2"][0]
    assert float(t2[6]) == pytest.approx(-6.0, rel=1e-14)
    assert _column(out / "resonances_corrected.csv", "residual").max() < 1e-8
    meta = json.loads((out / "resonances.json").read_text())
    assert meta["static"]["self_consistent"] is True
    assert meta["static"]["R"] == pytest.approx(meta["static"]["R_closed_form"], rel=1e-14)


def test_resonances_parameter_violation(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["resonances", "--set", "particle.alpha=2", "--out", str(out)]) == 3
    assert "mode T2" in capsys.readouterr().err
    assert not out.exists()


def test_outputs_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["resonances", "--out", str(a)]) == 0
    assert main(["resonances", "--out", str(b)]) == 0
    for name in ("resonances_static.csv", "resonances_corrected.csv", "resonances.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_hash_tracks_values():
    h1 = load_config(None).digest
    h2 = load_config(None, ["particle.alpha=11"]).digest
    assert h1 != h2
    assert load_config(None, ["particle.alpha=10.0"]).digest == h1


def test_scatter_freq_oracle_column(tmp_path):
    out = tmp_path / "out"
    pts = "-1 1 1; 0.5 0 0; 0 0.3 -0.2; 0.02 0.01 0; 2 -1 0.5"
    assert main(["scatter", "--set", f"scatter.points={pts}", "--set", "model.n=8", "--out", str(out)]) == 0
    err = _column(out / "field_freq.csv", "rel_err")
    assert err.size == 5
    assert err.max() <= 1e-4
    assert (out / "coefficients_0.csv").exists()


def test_scatter_time_summary(tmp_path):
    out = tmp_path / "out"
    assert main(["scatter", "--set", "scatter.mode=time", "--set", "scatter.time_span=4", "--out", str(out)]) == 0
    meta = json.loads((out / "window.json").read_text())
    pt = meta["points"][0]
    assert "quiescent_ratio" in pt
    assert pt["t0_minus"] < pt["t0_plus"]
    for key in ("rho", "eta1", "eta2", "R"):
        assert key in meta
    _, cols, _ = _csv(out / "traces_time.csv")
    assert "abs_err" in cols and "mode_N1_0" in cols


def test_scatter_empty_points(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["scatter", "--set", "scatter.points=", "--out", str(out)]) == 2
    assert "empty" in capsys.readouterr().err
    assert not out.exists()


def test_validate_defaults_pass(tmp_path, capsys):
    assert main(["validate", "--out", str(tmp_path / "v")]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text
    assert "9/9 checks passed" in text


def test_validate_coarse_grid_flags_jump(tmp_path, capsys):
    assert main(["validate", "--set", "grid.degree=6", "--filter", "jump", "--out", str(tmp_path / "v")]) == 1
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("jump")]
    assert len(lines) == 2
    assert any(ln.startswith("jump:N8") and "FAIL" in ln for ln in lines)


def test_validate_filter(tmp_path, capsys):
    assert main(["validate", "--filter", "slope", "--out", str(tmp_path / "v")]) == 0
    rows = [ln for ln in capsys.readouterr().out.splitlines() if "PASS" in ln or "FAIL" in ln]
    assert rows and all(r.startswith("slope:") for r in rows)
