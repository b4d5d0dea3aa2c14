import csv
import json

import numpy as np
import pytest

from rbolab import __version__
from rbolab.cli import main, worker_count
from rbolab.config import RunConfig, config_echo, parse_config
from rbolab.errors import (
    IoFailure,
    MalformedConfig,
    NonFiniteSample,
    SchemaMismatch,
    UnknownKey,
    VersionUnsupported,
)
from rbolab.io import (
    GAMMA_STUDY_COLUMNS,
    STABILITY_COLUMNS,
    read_field,
    write_csv,
    write_field,
    write_report,
)
from rbolab.functionals import WaveParams
from rbolab.spectral import Grid, RealField
from rbolab.stability import GammaStudyRow, StabilityReport

SMALL = ["--n", "512", "--half-length", "32"]


# -- config -------------------------------------------------------------------

def test_empty_config_uses_defaults():
    cfg = parse_config("", "ground-state", {"n": "1024"})
    assert cfg.n == 1024 and cfg.c == 1.0 and cfg.gamma == 0.01
    echo = config_echo(cfg)
    assert echo["n"] == {"value": 1024, "source": "flag"}
    assert echo["tol"] == {"value": 1e-10, "source": "default"}
    assert set(echo) == {f for f in RunConfig.__dataclass_fields__ if f != "provenance"}


def test_negative_gamma_is_rejected():
    with pytest.raises(MalformedConfig, match="gamma"):
        parse_config("gamma = -0.1\n", "ground-state")


def test_flag_overrides_file():
    cfg = parse_config("gamma = 0.1\nc = 2\n", "ground-state", {"gamma": "0.01"})
    assert cfg.gamma == 0.01 and cfg.c == 2.0
    assert cfg.provenance["gamma"] == "flag" and cfg.provenance["c"] == "file"


def test_config_lists_and_comments():
    cfg = parse_config("# sweep\ngammas = 0.1, 0.01 ,0.001  # three\nseeds=1,2\ndt = auto\n",
                       "converge-gamma")
    assert cfg.gammas == (0.1, 0.01, 0.001) and cfg.seeds == (1, 2) and cfg.dt is None


@pytest.mark.parametrize("text,match", [
    ("gamma 0.1\n", "line 1"),
    ("c = 1\nc = 2\n", "line 2: duplicate"),
    ("n = 1000\n", "power of two"),
    ("n = abc\n", "cannot parse"),
    ("gammas = 0.01, 0.1\n", "strictly decreasing"),
    ("init = blob\n", "init"),
    ("= 3\n", "missing key"),
])
def test_malformed_config(text, match):
    with pytest.raises(MalformedConfig, match=match):
        parse_config(text, "ground-state")


def test_unknown_key_is_an_error():
    with pytest.raises(UnknownKey):
        parse_config("colour = red\n", "ground-state")
    with pytest.raises(UnknownKey):
        parse_config("", "ground-state", {"colour": "red"})


def test_unknown_command():
    with pytest.raises(MalformedConfig):
        parse_config("", "plot")


# -- field files -----------------------------------------------------------------

def test_field_round_trip_is_bit_identical(tmp_path, rng):
    g = Grid(256, 7.3)
    u = RealField(g, rng.standard_normal(g.n) * 10.0 ** rng.integers(-30, 30, g.n))
    write_field(u, tmp_path / "u.json")
    v = read_field(tmp_path / "u.json")
    assert v.grid == g
    assert np.array_equal(u.values.view(np.int64), v.values.view(np.int64))


def _doc(**over):
    doc = {"format_version": 1, "grid": {"n": 16, "half_length": 1.0}, "samples": [0.0] * 16}
    doc.update(over)
    return doc


def _write(tmp_path, doc, text=None):
    p = tmp_path / "f.json"
    p.write_text(text if text is not None else json.dumps(doc))
    return p


def test_non_power_of_two_is_schema_mismatch(tmp_path):
    p = _write(tmp_path, _doc(grid={"n": 12, "half_length": 1.0}, samples=[0.0] * 12))
    with pytest.raises(SchemaMismatch):
        read_field(p)


@pytest.mark.parametrize("doc", [
    {"format_version": 1, "samples": []},
    _doc(samples=[0.0] * 3),
    _doc(samples=["a"] * 16),
    _doc(grid={"n": 16.0, "half_length": 1.0}),
    _doc(grid={"n": 16, "half_length": -1.0}),
])
def test_schema_mismatch(tmp_path, doc):
    with pytest.raises(SchemaMismatch):
        read_field(_write(tmp_path, doc))


def test_not_json(tmp_path):
    with pytest.raises(SchemaMismatch):
        read_field(_write(tmp_path, None, text="{nope"))


def test_version_bump_names_both_versions(tmp_path):
    with pytest.raises(VersionUnsupported, match=r"2.*1"):
        read_field(_write(tmp_path, _doc(format_version=2)))


def test_non_finite_samples(tmp_path):
    p = _write(tmp_path, None, text=json.dumps(_doc()).replace("0.0]", "NaN]"))
    with pytest.raises(NonFiniteSample):
        read_field(p)
    u = RealField(Grid(16, 1.0), np.zeros(16))
    u.values[2] = np.inf
    with pytest.raises(NonFiniteSample):
        write_field(u, tmp_path / "bad.json")


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        read_field(tmp_path / "absent.json")


# -- reports -------------------------------------------------------------------

def test_gamma_report(tmp_path):
    rows = [GammaStudyRow(0.1, 3.0, 1.0, 1e-11, 50), GammaStudyRow(0.01, 2.5, 0.5, 2e-11, 40)]
    path = write_report(rows, tmp_path / "g.csv", {"version": __version__})
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(GAMMA_STUDY_COLUMNS) == "gamma,m,dist_h12,residual,iterations"
    assert lines[1] == "0.1,3.0,1.0,1e-11,50" and len(lines) == 3
    side = json.loads((tmp_path / "g.json").read_text())
    assert side["version"] == __version__


def test_empty_report_is_header_only(tmp_path):
    path = write_report([], tmp_path / "e.csv")
    assert path.read_text() == "gamma,m,dist_h12,residual,iterations\n"


def test_stability_report_columns(tmp_path):
    rep = StabilityReport(WaveParams(1.0, 0.01), 0.01, 3, np.array([0.0, 0.5]), np.array([0.1, 0.2]),
                          np.array([0.0, 0.5]), np.zeros(2), np.zeros(2), 1.0)
    path = write_report(rep, tmp_path / "s.csv")
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == STABILITY_COLUMNS == ("t", "orbital_distance", "shift", "E_drift", "V_drift")
    assert rows[2] == ["0.5", "0.2", "0.5", "0.0", "0.0"]
    assert json.loads((tmp_path / "s.json").read_text())["verdict"] == "bounded"


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "x.csv", ("a", "b"), [(1,)])


def test_unwritable_report(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(IoFailure):
        write_report([], blocker / "sub" / "r.csv")


# -- command line ----------------------------------------------------------------

def test_cli_converge_gamma(tmp_path, capsys):
    rc = main(["converge-gamma", *SMALL, "--gammas", "0.1,0.01", "--out-dir", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "converge_gamma.csv").read_text().splitlines()
    assert lines[0] == "gamma,m,dist_h12,residual,iterations" and len(lines) == 3
    side = json.loads((tmp_path / "converge_gamma.json").read_text())
    assert side["config"]["gammas"] == {"value": [0.1, 0.01], "source": "flag"}
    assert side["config"]["tol"]["source"] == "default"
    assert side["version"] == __version__ and side["wall_clock_s"] >= 0


def test_cli_config_file_and_override(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("n = 512\nhalf_length = 32\ngamma = 0.1\n")
    out = tmp_path / "o"
    assert main(["ground-state", "--config", str(conf), "--gamma", "0.05", "--out-dir", str(out)]) == 0
    row = list(csv.DictReader((out / "ground_state.csv").open()))[0]
    assert float(row["gamma"]) == 0.05
    psi = read_field(out / "psi.json")
    assert psi.grid == Grid(512, 32.0)


def test_cli_exit_codes(tmp_path, monkeypatch):
    out = ["--out-dir", str(tmp_path)]
    assert main(["ground-state", "--gamma", "-0.1", *out]) == 2
    assert main(["ground-state", "--config", str(tmp_path / "missing.conf"), *out]) == 4
    assert main(["ground-state", *SMALL, "--max-iter", "2", *out]) == 3
    assert main(["evolve", *SMALL, "--input", str(tmp_path / "none.json"), *out]) == 4
    with pytest.raises(SystemExit) as info:
        main(["ground-state", "--bogus", "1"])
    assert info.value.code == 2
    monkeypatch.setenv("RBO_WORKERS", "zero")
    assert main(["stability", *SMALL, "--t-end", "0.1", *out]) == 2


def test_worker_count(monkeypatch):
    monkeypatch.delenv("RBO_WORKERS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("RBO_WORKERS", "3")
    assert worker_count() == 3


def test_stability_output_independent_of_workers(tmp_path, monkeypatch):
    args = ["stability", *SMALL, "--t-end", "0.5", "--seeds", "0,1"]
    monkeypatch.setenv("RBO_WORKERS", "1")
    assert main([*args, "--out-dir", str(tmp_path / "a")]) == 0
    monkeypatch.setenv("RBO_WORKERS", "2")
    assert main([*args, "--out-dir", str(tmp_path / "b")]) == 0
    for s in (0, 1):
        name = f"stability_seed{s}.csv"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_evolve_from_field_file(tmp_path):
    assert main(["ground-state", *SMALL, "--out-dir", str(tmp_path)]) == 0
    rc = main(["evolve", *SMALL, "--t-end", "0.2", "--input", str(tmp_path / "psi.json"),
               "--out-dir", str(tmp_path / "e")])
    assert rc == 0
    rows = list(csv.DictReader((tmp_path / "e" / "evolve.csv").open()))
    assert float(rows[-1]["t"]) == pytest.approx(0.2)
    assert read_field(tmp_path / "e" / "final.json").grid == Grid(512, 32.0)
