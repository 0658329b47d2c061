import json
import math
from importlib import resources

import pytest

from trustfusion import m_star_noiseless_exact, m_star_normal_approx
from trustfusion.cli import main

STUDY_SPEC = str(resources.files("trustfusion") / "specs" / "numerical_study.toml")
HW_SPEC = str(resources.files("trustfusion") / "specs" / "hardware_analog.toml")


def _study_text():
    with open(STUDY_SPEC) as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# spec parsing and exit codes
# ---------------------------------------------------------------------------

def test_missing_spec_file_exits_2(tmp_path, capsys):
    assert main(["run", "--spec", str(tmp_path / "nope.toml"),
                 "--out", str(tmp_path)]) == 2
    assert "not found" in capsys.readouterr().err


def test_malformed_toml_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("not [valid toml")
    assert main(["run", "--spec", str(bad), "--out", str(tmp_path)]) == 3


def test_unknown_key_exits_3(tmp_path, capsys):
    spec = tmp_path / "unk.toml"
    spec.write_text(_study_text().replace("[experiment]", "mystery = 3\n[experiment]"))
    assert main(["run", "--spec", str(spec), "--out", str(tmp_path)]) == 3
    assert "mystery" in capsys.readouterr().err


def test_missing_required_table_exits_3(tmp_path, capsys):
    spec = tmp_path / "frag.toml"
    spec.write_text("[scenario]\nn = 10\n")
    assert main(["run", "--spec", str(spec), "--out", str(tmp_path)]) == 3


def test_bad_probability_exits_4(tmp_path, capsys):
    spec = tmp_path / "inv.toml"
    spec.write_text(_study_text().replace("p_fa_l = 0.15", "p_fa_l = 1.15"))
    assert main(["run", "--spec", str(spec), "--out", str(tmp_path)]) == 4
    assert "p_fa_l" in capsys.readouterr().err


def test_zero_trials_exits_4(tmp_path, capsys):
    spec = tmp_path / "zt.toml"
    spec.write_text(_study_text().replace("trials = 1000", "trials = 0"))
    assert main(["run", "--spec", str(spec), "--out", str(tmp_path)]) == 4


def test_unknown_method_name_exits_3(tmp_path, capsys):
    spec = tmp_path / "meth.toml"
    spec.write_text(_study_text().replace('"oracle"', '"majority_vote"'))
    assert main(["run", "--spec", str(spec), "--out", str(tmp_path)]) == 3


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def test_run_writes_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--spec", STUDY_SPEC, "--out", str(out),
                 "--trials", "60"]) == 0
    lines = (out / "run.csv").read_text().splitlines()
    assert lines[0] == "method,trials,errors,error_rate,ci_halfwidth"
    assert len(lines) == 8  # header + 7 methods
    for line in lines[1:]:
        method, trials, errors, rate, hw = line.split(",")
        assert trials == "60"
        assert 0.0 <= float(rate) <= 1.0
        assert math.isclose(float(rate), int(errors) / 60, abs_tol=1e-12)

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "run"
    assert manifest["outputs"] == ["run.csv"]
    assert manifest["config"]["scenario"]["seed"] == 12345
    assert "artifact_version" in manifest


def test_run_rerun_is_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["run", "--spec", STUDY_SPEC, "--out", str(out),
                     "--trials", "80"]) == 0
    assert (out_a / "run.csv").read_bytes() == (out_b / "run.csv").read_bytes()
    assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()


def test_run_threads_do_not_change_output(tmp_path):
    out_a, out_b = tmp_path / "t1", tmp_path / "t8"
    assert main(["run", "--spec", STUDY_SPEC, "--out", str(out_a),
                 "--trials", "120", "--threads", "1"]) == 0
    assert main(["run", "--spec", STUDY_SPEC, "--out", str(out_b),
                 "--trials", "120", "--threads", "8"]) == 0
    assert (out_a / "run.csv").read_bytes() == (out_b / "run.csv").read_bytes()
    assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()


def test_run_seed_override_changes_data(tmp_path):
    out_a, out_b = tmp_path / "s1", tmp_path / "s2"
    assert main(["run", "--spec", STUDY_SPEC, "--out", str(out_a),
                 "--trials", "100", "--seed", "1"]) == 0
    assert main(["run", "--spec", STUDY_SPEC, "--out", str(out_b),
                 "--trials", "100", "--seed", "2"]) == 0
    assert (out_a / "run.csv").read_bytes() != (out_b / "run.csv").read_bytes()


def test_hardware_spec_runs(tmp_path):
    out = tmp_path / "hw"
    assert main(["run", "--spec", HW_SPEC, "--out", str(out), "--trials", "50"]) == 0
    assert (out / "run.csv").exists()


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_sweep_csv_schema(tmp_path):
    spec = tmp_path / "sw.toml"
    spec.write_text(_study_text().replace(
        "proportions = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]",
        "proportions = [0.0, 0.5]"))
    out = tmp_path / "out"
    assert main(["sweep", "--spec", str(spec), "--out", str(out),
                 "--trials", "40"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "proportion,method,trials,errors,error_rate,ci_halfwidth"
    assert len(lines) == 1 + 2 * 7
    assert lines[1].startswith("0.0,two_stage,")
    assert lines[8].startswith("0.5,two_stage,")


def test_sweep_warns_on_fractional_count(tmp_path, capsys):
    spec = tmp_path / "frac.toml"
    spec.write_text(_study_text().replace(
        "proportions = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]",
        "proportions = [0.25]"))
    assert main(["sweep", "--spec", str(spec), "--out", str(tmp_path / "o"),
                 "--trials", "10"]) == 0
    err = capsys.readouterr().err
    assert "fractional" in err and "3 malicious" in err


# ---------------------------------------------------------------------------
# mstar
# ---------------------------------------------------------------------------

def test_mstar_matches_library(tmp_path):
    out = tmp_path / "ms"
    assert main(["mstar", "--spec", STUDY_SPEC, "--out", str(out)]) == 0
    lines = (out / "mstar.csv").read_text().splitlines()
    assert lines[0] == "p_trust_l,m_star_exact,m_star_approx"
    rows = {float(l.split(",")[0]): (float(l.split(",")[1]), float(l.split(",")[2]))
            for l in lines[1:]}
    assert len(rows) == 9
    exact, approx = rows[0.3]
    assert exact == m_star_noiseless_exact(0.3, 0.7, 50, (0.5, 0.5), delta_m=0.02)
    assert approx == m_star_normal_approx(0.3, 0.7, 50, (0.5, 0.5), delta_m=0.02)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def test_bounds_csv_decays(tmp_path):
    out = tmp_path / "bd"
    assert main(["bounds", "--spec", STUDY_SPEC, "--out", str(out)]) == 0
    lines = (out / "bounds.csv").read_text().splitlines()
    assert lines[0] == "N,exact_error,bound"
    rows = [l.split(",") for l in lines[1:]]
    assert [r[0] for r in rows] == ["10", "20", "40", "80"]
    exacts = [float(r[1]) for r in rows]
    bounds = [float(r[2]) for r in rows]
    assert all(b >= e for e, b in zip(exacts, bounds))
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    assert math.isclose(bounds[0], 0.8008415591610427, rel_tol=1e-12)
    assert math.isclose(exacts[0], 0.03542553200741582, rel_tol=1e-12)


def test_bounds_validity_refusal_surfaces_per_row(tmp_path, capsys):
    spec = tmp_path / "bv.toml"
    spec.write_text(_study_text()
                    .replace("m_bar = 0.2", "m_bar = 0.6")
                    .replace("n_values = [10, 20, 40, 80]", "n_values = [6, 10]"))
    out = tmp_path / "o"
    assert main(["bounds", "--spec", str(spec), "--out", str(out)]) == 0
    lines = (out / "bounds.csv").read_text().splitlines()
    row6, row10 = lines[1].split(","), lines[2].split(",")
    assert row6[2] != ""        # N=6 bound exists (even though > 1)
    assert row10[2] == ""       # N=10 window breaks; cell left empty
    assert "no valid bound at n=10" in capsys.readouterr().err


def test_missing_sweep_table_is_an_error_for_sweep(tmp_path, capsys):
    # hardware spec has no [sweep]; asking for a sweep must fail cleanly
    assert main(["sweep", "--spec", HW_SPEC, "--out", str(tmp_path / "x")]) == 3
