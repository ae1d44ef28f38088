import csv
import json

import mpmath
import pytest

from diskapprox.cli import main
from diskapprox.errors import ScenarioError
from diskapprox.scenario import bundled_names, load_scenario, parse_scenario

SMALL = {
    "schema": "diskapprox-scenario/1",
    "name": "small",
    "G": {"family": "expdec", "c": 1.0},
    "w": [{"kind": "const", "v": 1.0}],
    "targets": [{"label": "1_J", "kind": "indicator", "arcs": [["9/20", "11/20"]]}],
    "N_list": [0, 5, 10],
}


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(SMALL, indent=2))
    return p


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bundled_scenarios_parse():
    assert set(bundled_names()) >= {"split_cantor", "irreducible_w1"}
    sc = load_scenario("irreducible_w1")
    assert sc.N_list[0] == 10 and sc.N_list[-1] == 400
    assert [t.label for t in sc.targets] == ["1_J", "conj_z"]


def test_parse_errors_carry_location(small, capsys):
    text = small.read_text().replace('"expdec"', '"expdek"')
    with pytest.raises(ScenarioError) as e:
        parse_scenario(text)
    assert e.value.field == "G.family" and e.value.line == 5
    with pytest.raises(ScenarioError) as e:
        parse_scenario('{"name": "x",\n  "G": }')
    assert e.value.line == 2
    with pytest.raises(ScenarioError):
        load_scenario("small").with_overrides(precision=32)
    bad = small.with_name("bad.json")
    bad.write_text(text)
    assert main(["predict", str(bad)]) == 1
    assert "G.family" in capsys.readouterr().err
    assert main(["run"]) == 1
    assert main(["run", str(small), "--precision", "16"]) == 1


def test_run_writes_profile(small, tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", str(small), "--out", str(out)]) == 0
    rows = _read(out / "profile_1_J.csv")
    assert [r["N"] for r in rows] == ["0", "5", "10"]
    # degree 0: d^2 = |J| - |J|^2 / (alpha_0 + 1), alpha_0 = 2 int_0^1 r e^{-1/(1-r)} dr
    a0 = 2 * mpmath.quad(lambda r: r * mpmath.exp(-1 / (1 - r)) if r < 1 else 0, [0, 0.5, 1])
    assert float(rows[0]["d_N"]) == pytest.approx(float(mpmath.sqrt(0.1 - 0.01 / (a0 + 1))), rel=1e-12)
    rep = json.loads((out / "report.json").read_text())
    assert all(rep["checks"].values())
    assert "timing" not in rep and (out / "timing.json").exists()


def test_empty_grid_does_nothing(small, tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", str(small), "--out", str(out)]) == 0
    assert not out.exists()


def test_sweep_recovers_exponent(small, tmp_path):
    out = tmp_path / "sweep"
    args = ["sweep", str(small), "--out", str(out), "--grid", "G.c=0.5,1,2", "--jobs", "2"]
    assert main(args) == 0
    rows = _read(out / "sweep.csv")
    assert [float(r["G.c"]) for r in rows] == [0.5, 1, 2]
    assert [float(r["expdec_d"]) for r in rows] == pytest.approx([0.5, 1, 2], rel=1e-6)
    assert len(list(out.glob("point_*"))) == 3


def test_sweep_regime_flip(small, tmp_path):
    sc = dict(SMALL, G={"family": "stretched", "c": 1.0, "alpha": 0.5})
    p = tmp_path / "stretched.json"
    p.write_text(json.dumps(sc))
    out = tmp_path / "sweep"
    assert main(["sweep", str(p), "--out", str(out), "--grid", "G.alpha=0.5,1"]) == 0
    rows = _read(out / "sweep.csv")
    assert [r["verdict"] for r in rows] == ["out of scope", "irreducible"]


def test_predict_and_moments_output(small, capsys):
    assert main(["predict", str(small), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "irreducible"
    assert main(["moments", str(small), "--N", "5", "--x", "10", "100"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,alpha,error" and len(lines) == 7
    assert main(["predict", "split_cantor"]) == 0
    assert "full splitting" in capsys.readouterr().out


def test_bundled_regression(bundled_runs):
    # values frozen from the first reference run at 128 bits
    (rep, out), _ = bundled_runs["irreducible_w1"]
    rows = {int(r["N"]): r for r in _read(out / "profile_1_J.csv")}
    assert float(rows[10]["d_N"]) == pytest.approx(0.22532316323585405, rel=1e-12)
    assert float(rows[200]["certificate"]) == pytest.approx(0.0062377445780437794, rel=1e-9)
    conj = _read(out / "profile_conj_z.csv")
    assert all(float(r["d_N"]) == pytest.approx(1.0, rel=1e-12) for r in conj)
    (rep, out), _ = bundled_runs["split_cantor"]
    rows = {int(r["N"]): r for r in _read(out / "profile_1_E.csv")}
    assert float(rows[400]["d_N"]) == pytest.approx(0.09332134072090371, rel=1e-10)
    assert rep.exit_code == 0
