from __future__ import annotations

import json
import subprocess
import sys

import pytest

from distopt import cli
from distopt.oracle import find_scenario_instance
from distopt.thresholds import SCENARIO_II_CONSUMER_PREFERS

from conftest import FIVE_POINT, LADDER, SECOND_CROSSING, make_instance


def write(tmp_path, name, obj) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_optimize_writes_a_report(tmp_path, capsys):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    out = tmp_path / "five.report.json"
    assert cli.main(["optimize", "--input", inp, "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["schema_version"] == FIVE_POINT["schema_version"]
    assert report["instance"]["fingerprint"] == cli.fingerprint(FIVE_POINT)
    assert [p["id"] for p in report["d_star"]["points"]] == ["c2", "c3", "c4", "c5"]
    assert report["n_star"] == 4.0
    assert report["verdict"]["kind"] == "StayAtDStar_Thm2"
    assert report["thresholds"]["kappa_r2"] == pytest.approx(-0.5)


def test_optimize_to_stdout(tmp_path, capsys):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    assert cli.main(["optimize", "--input", inp]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_star"] == 4.0


def test_csv_format_needs_an_output_path(tmp_path, capsys):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    assert cli.main(["optimize", "--input", inp, "--format", "csv"]) == 1
    assert "error" in capsys.readouterr().err


def test_csv_curves_are_written(tmp_path):
    inp = write(tmp_path, "ladder.json", LADDER)
    out = tmp_path / "ladder.report.json"
    assert cli.main(["optimize", "--input", inp, "--output", str(out), "--format", "csv"]) == 0
    trace = (tmp_path / "ladder.report.trace.csv").read_text().splitlines()
    assert trace[0] == "j,id,weight,n,q,m,w,is_d_star"
    assert len(trace) == 13  # header + every pool point
    thresh = (tmp_path / "ladder.report.thresholds.csv").read_text().splitlines()
    assert thresh[0].startswith("n_r2,x_l_kappa,x_u_kappa,x_u_kappa_alt")
    assert len(thresh) == 51


def test_schema_violations_exit_one(tmp_path, capsys):
    bad = dict(FIVE_POINT)
    bad.pop("participation")
    inp = write(tmp_path, "bad.json", bad)
    assert cli.main(["optimize", "--input", inp]) == 1

    dup = make_instance([("a", 1.0, 1.0, 1.0)])
    dup["points"].append(dict(dup["points"][0]))
    inp2 = write(tmp_path, "dup.json", dup)
    assert cli.main(["optimize", "--input", inp2]) == 1

    (tmp_path / "noise.json").write_text("{not json")
    assert cli.main(["optimize", "--input", str(tmp_path / "noise.json")]) == 1
    capsys.readouterr()


def test_unknown_schema_keys_are_rejected(tmp_path, capsys):
    inst = make_instance([("a", 1.0, 1.0, 1.0)])
    inst["surprise"] = True
    inp = write(tmp_path, "extra.json", inst)
    assert cli.main(["optimize", "--input", inp]) == 1
    capsys.readouterr()


def test_degenerate_instances_exit_two_but_still_report(tmp_path):
    inp = write(tmp_path, "u.json", make_instance([("u", 10.0, 1.0, 1.0)]))
    out = tmp_path / "u.report.json"
    assert cli.main(["optimize", "--input", inp, "--output", str(out)]) == 2
    assert json.loads(out.read_text())["verdict"]["kind"] == "UnderServed"


def test_batch_mode_reports_every_file(tmp_path):
    write(tmp_path, "one.json", FIVE_POINT)
    write(tmp_path, "two.json", make_instance([("u", 10.0, 1.0, 1.0)]))
    (tmp_path / "stale.report.json").write_text("{}")
    code = cli.main(["optimize", "--batch", str(tmp_path)])
    assert code == 2  # worst exit among the batch
    assert (tmp_path / "one.report.json").exists()
    assert (tmp_path / "two.report.json").exists()
    # pre-existing report files are not treated as instances
    assert not (tmp_path / "stale.report.report.json").exists()


def test_analyze_reports_the_probe_candidate(tmp_path):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    out = tmp_path / "ana.json"
    assert cli.main(["analyze", "--input", inp, "--candidate", "c1",
                     "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["candidate"] == "c1"
    assert report["verdict"]["kind"] == "StayAtDStar_Thm2"
    assert report["thresholds"]["kappa_r2"] == pytest.approx(-0.5)


def test_analyze_validates_the_candidate(tmp_path, capsys):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    assert cli.main(["analyze", "--input", inp, "--candidate", "ghost"]) == 1
    assert cli.main(["analyze", "--input", inp, "--candidate", "c5"]) == 1
    capsys.readouterr()


def test_carveout_command_on_a_carving_instance(tmp_path):
    found = find_scenario_instance(
        SCENARIO_II_CONSUMER_PREFERS, budget=20, rng_seed=0, require_carveout=True
    )
    assert found is not None
    inp = write(tmp_path, "carve.json", found.instance)
    out = tmp_path / "carve.report.json"
    assert cli.main(["carveout", "--input", inp, "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["applicable"] and report["feasible"]
    assert report["carveout"]["n_y"] > 0.0


def test_carveout_command_without_a_disagreement(tmp_path):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    out = tmp_path / "carve.json"
    assert cli.main(["carveout", "--input", inp, "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert not report["applicable"]
    assert report["reason"]


def test_gen_profiles_validate_and_are_deterministic(tmp_path):
    for profile in ("uniform", "monotone", "underserved", "saturated",
                    "scenario:StayAtDStar_Thm2"):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert cli.main(["gen", "--profile", profile, "--seed", "9",
                         "--output", str(a)]) == 0
        assert cli.main(["gen", "--profile", profile, "--seed", "9",
                         "--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes(), profile
        inst = json.loads(a.read_text())
        # generated files themselves pass the input gate
        import jsonschema

        jsonschema.validate(inst, cli.INSTANCE_SCHEMA)


def test_gen_rejects_unknown_profiles(tmp_path, capsys):
    assert cli.main(["gen", "--profile", "mystery"]) == 1
    capsys.readouterr()


def test_oracle_check_passes_at_small_sizes(tmp_path):
    out = tmp_path / "oracle.json"
    assert cli.main(["oracle-check", "--samples", "400", "--grid", "8",
                     "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["ok"]
    assert report["threshold_crosscheck"]["mismatches"] == []
    assert report["finite_difference"]["mismatches"] == []


def test_log_env_var_does_not_change_results(tmp_path, monkeypatch):
    inp = write(tmp_path, "five.json", FIVE_POINT)
    quiet = tmp_path / "quiet.json"
    assert cli.main(["optimize", "--input", inp, "--output", str(quiet)]) == 0
    monkeypatch.setenv("DISTOPT_LOG", "debug")
    loud = tmp_path / "loud.json"
    assert cli.main(["optimize", "--input", inp, "--output", str(loud)]) == 0
    assert quiet.read_bytes() == loud.read_bytes()


def test_console_script_roundtrip(tmp_path):
    inp = write(tmp_path, "chain.json", SECOND_CROSSING)
    out = tmp_path / "chain.report.json"
    proc = subprocess.run(
        [sys.executable, "-m", "distopt.cli", "optimize", "--input", inp,
         "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    report = json.loads(out.read_text())
    assert report["verdict"]["kind"] == "ContinueToD2Star_Thm4"
    assert report["d2_star"] is not None
    assert report["d2_deltas"]["delta_v"] == pytest.approx(0.0, abs=1e-9)


def test_canonical_json_is_stable_and_strict():
    text = cli.canonical_json({"b": 1, "a": [2, 3]})
    assert text == '{\n  "a": [\n    2,\n    3\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        cli.canonical_json({"x": float("nan")})
