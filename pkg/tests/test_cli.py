import io
import json

import pytest

import pilab.errors as errors
from pilab.cli import RunManifest, run
from pilab.cli.config import load_config
from pilab.cli.jsonfmt import dumps, fmt_float
from pilab.cli.main import main
from pilab.errors import SchemaViolation


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_hierarchy_json_is_deterministic(capsys):
    code, a, _ = _run(["hierarchy", "gen", "--m", "4", "--format", "json"], capsys)
    _, b, _ = _run(["hierarchy", "gen", "--m", "4", "--format", "json"], capsys)
    assert code == 0 and a == b
    doc = json.loads(a)
    assert doc["m"] == 4 and doc["normalization"] == {"num": "64", "den": "1"}
    assert "paper_normalized" in doc


def test_hierarchy_text(capsys):
    code, out, _ = _run(["hierarchy", "gen", "--m", "2", "--format", "text"], capsys)
    assert code == 0 and out.strip().endswith("= 0") and "4*s" in out


def test_gfun_record(capsys):
    code, out, _ = _run(["gfun", "--m", "2"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert set(rec) >= {"m", "sign", "z0", "c_asym", "c_coeffs", "b_coeffs", "positivity",
                        "crosscheck"}
    assert rec["positivity"] is True and rec["c_coeffs"] == ["1", "3/2", "15/8"]


def test_painleve_solve_writes_csv_and_sidecar(tmp_path, capsys):
    code, _, _ = _run(["--out-dir", str(tmp_path), "painleve", "solve", "--m", "2", "--S", "40",
                       "--N", "2000"], capsys)
    assert code == 0
    lines = (tmp_path / "sol.csv").read_text().splitlines()
    assert lines[0] == "s,q" and len(lines) == 2001
    side = json.loads((tmp_path / "sol.json").read_text())
    assert set(side) == {"m", "t", "S", "N", "residual_sup", "newton_iters", "fitted_exponent",
                         "fitted_c"}
    assert side["residual_sup"] < 1e-8


def test_painleve_json_only(tmp_path, capsys):
    code, _, _ = _run(["--format", "json", "--out-dir", str(tmp_path), "painleve", "solve",
                       "--m", "2", "--S", "12", "--N", "241"], capsys)
    assert code == 0
    assert not (tmp_path / "sol.csv").exists()
    doc = json.loads((tmp_path / "sol.json").read_text())
    assert len(doc["s"]) == len(doc["q"]) == 241


def test_kdv_critical(capsys):
    code, out, _ = _run(["kdv", "critical", "--m", "2"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["t_c"] == pytest.approx(3 ** 0.5 / 8, abs=1e-12)


def test_kdv_run_with_config(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[data]\nm = 2\nwidth = 1.0\n\n[grid]\nN = 1024\n")
    code, _, _ = _run(["--out-dir", str(tmp_path), "kdv", "run", "--data", str(cfg), "--eps",
                       "0.05", "--t", "0.1", "--out", "u.csv"], capsys)
    assert code == 0
    side = json.loads((tmp_path / "u.json").read_text())
    assert side["N"] == 1024 and side["tail_ratio"] < 1e-10


@pytest.mark.slow
def test_compare_report(tmp_path, capsys):
    code, _, _ = _run(["--out-dir", str(tmp_path), "compare", "--m", "2", "--eps",
                       "2e-2,1e-2"], capsys)
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert abs(rep["rate"] - 4 / 7) <= 0.2


# --- exit codes and errors ------------------------------------------------

def test_validation_errors_exit_2(capsys):
    code, _, err = _run(["painleve", "solve", "--m", "1"], capsys)
    assert code == 2 and json.loads(err)["error"] == "OddOrderRequested"
    code, _, err = _run(["painleve", "solve", "--m", "2", "--N", "8"], capsys)
    assert code == 2 and json.loads(err)["error"] == "ConfigInvalid"


def test_solver_failure_exit_3(capsys):
    code, _, err = _run(["kdv", "run", "--m", "2", "--eps", "0.01", "--t", "0.2", "--N", "256"],
                        capsys)
    rec = json.loads(err)
    assert code == 3 and rec["error"] == "ResolutionInsufficient" and rec["tail_ratio"] > 1e-10


def test_error_codes_are_distinct():
    classes = [c for c in vars(errors).values()
               if isinstance(c, type) and issubclass(c, errors.PilabError)]
    codes = [c.code for c in classes]
    assert len(codes) == len(set(codes)) >= 19
    assert all(c.code == c.__name__ for c in classes)


# --- manifests ----------------------------------------------------------

def test_manifest_round_trip_is_byte_identical():
    m = RunManifest("painleve", {"action": "solve", "m": 4, "t": [0.1, 0.0, -0.2], "S": 60.0,
                                 "N": 4096}, {"csv": "sol.csv"}).validate()
    text = m.to_json()
    back = RunManifest.from_json(text)
    assert back == m and back.to_json() == text


@pytest.mark.parametrize("doc, where", [
    ({"command": "gfun", "parameters": {"m": 2, "bogus": 1}}, "manifest.parameters.bogus"),
    ({"command": "gfun", "parameters": {"m": 2}, "extra": 1}, "manifest.extra"),
    ({"command": "nope"}, "manifest.command"),
    ({"command": "gfun", "parameters": {"m": "2"}}, "manifest.parameters.m"),
    ({"command": "gfun", "parameters": {"m": 2}, "outputs": {"png": "x"}}, "manifest.outputs.png"),
    ({"command": "painleve", "parameters": {"m": 2, "action": "plot"}}, "manifest.parameters.action"),
])
def test_manifest_rejects_bad_documents(doc, where):
    with pytest.raises(SchemaViolation) as info:
        RunManifest.from_obj(doc)
    assert info.value.details["path"] == where


def test_run_manifest_file_matches_direct_call(tmp_path, capsys):
    man = tmp_path / "m.json"
    code, direct, _ = _run(["--save-manifest", str(man), "gfun", "--m", "4"], capsys)
    assert code == 0
    code, replay, _ = _run(["run", str(man)], capsys)
    assert code == 0 and replay == direct


def test_run_rejects_bad_manifest_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"command": "gfun", "parameters": {"m": 2, "bogus": 1}}')
    code, _, err = _run(["run", str(bad)], capsys)
    assert code == 2 and str(bad) in json.loads(err)["path"]


def test_runner_streams():
    out, err = io.StringIO(), io.StringIO()
    assert run(RunManifest("gfun", {"m": 2}), stdout=out, stderr=err) == 0
    assert json.loads(out.getvalue())["m"] == 2 and err.getvalue() == ""


# --- config files and formatting ------------------------------------------

def test_config_loading(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[data]\nm = 4\nslope = -13/10\n[compare]\neps = 0.02, 0.01\n")
    cfg = load_config(p)
    assert cfg["data"] == {"m": 4, "slope": "-13/10"} and cfg["compare"]["eps"] == [0.02, 0.01]


@pytest.mark.parametrize("text, where", [
    ("[plot]\nx = 1\n", ":[plot]"),
    ("[data]\ncolour = red\n", ":[data].colour"),
    ("[grid]\nN = many\n", ":[grid].N"),
])
def test_config_errors_name_the_key(tmp_path, text, where):
    p = tmp_path / "c.ini"
    p.write_text(text)
    with pytest.raises(SchemaViolation) as info:
        load_config(p)
    assert info.value.details["path"] == f"{p}{where}"


def test_float_formatting():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert json.loads(dumps({"b": [1.0, float("nan")], "a": 1})) == {"a": 1, "b": [1, "NaN"]}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')
