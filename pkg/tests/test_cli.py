import json

import pytest

from richlab.cli import main, parse_config, run_experiment
from richlab.errors import ConfigurationError
from richlab.lattice import HyperplaneMinusOrigin


def test_parse_survival_example_line():
    cfg = parse_config(
        "kind=survival_curve cfg=hyperplane:W=256 lambda2=1.0 R=16,32,64 reps=2000 seed=7\n"
    )
    assert cfg.kind == "survival"
    assert cfg.seed == 7 and cfg.reps == 2000
    assert cfg.params["cfg"] == HyperplaneMinusOrigin(256)
    assert cfg.params["R"] == (16, 32, 64)


def test_survival_example_config_runs_with_clipped_seed_line(tmp_path):
    # W=256 exceeds the default domain M=2*64=128; the seed line is clipped to the walls
    out = tmp_path / "wide"
    cfg = parse_config(
        f"kind=survival cfg=hyperplane:W=256 lambda2=1.0 R=4,8 reps=3 seed=7 out={out}\n"
    )
    assert run_experiment(cfg) == 0


def test_parse_negative_rate_names_precondition():
    with pytest.raises(ConfigurationError, match="rate > 0"):
        parse_config("kind=survival cfg=hyperplane:W=64 R=16,32 reps=10\nlambda2=-1\n")


def test_parse_negative_rate_reports_location():
    with pytest.raises(ConfigurationError, match="line 2"):
        parse_config("kind=survival cfg=hyperplane:W=64 R=16,32 reps=10\nlambda2=-1\n")


def test_halfaxis_truncation_below_domain_rule_errors():
    with pytest.raises(ConfigurationError, match="M = 2R"):
        parse_config("kind=survival cfg=halfaxis:L=64 R=16,128 reps=10\n")


def test_unknown_key_reports_location():
    with pytest.raises(ConfigurationError, match=r"line 2, col 1: unknown key 'nn'"):
        parse_config("kind=mu reps=5\nnn=3\n")


def test_type_mismatch_reports_location():
    with pytest.raises(ConfigurationError, match="line 1.*bad value for 'n'"):
        parse_config("kind=mu n=abc reps=5\n")


def test_zero_reps_rejected_immediately():
    with pytest.raises(ConfigurationError, match="reps"):
        parse_config("kind=mu n=4 reps=0\n")


def test_missing_required_key():
    with pytest.raises(ConfigurationError, match="missing required key 'reps'"):
        parse_config("kind=mu n=4\n")


def test_comments_and_blank_lines_ignored():
    cfg = parse_config("# a comment\n\nkind=mu n=4 reps=2  # trailing\n")
    assert cfg.params["n"] == 4


def test_config_round_trips_through_text():
    cfg = parse_config("kind=survival cfg=hyperplane:W=64 R=8,16,32 reps=12 seed=3 lambda2=1.5\n")
    assert parse_config(cfg.to_text()) == cfg


def test_run_mu_writes_expected_artifacts(tmp_path):
    out = tmp_path / "mu"
    cfg = parse_config(f"kind=mu n=4 reps=3 seed=1 out={out}\n")
    assert run_experiment(cfg) == 0
    assert (out / "results.csv").exists()
    assert (out / "summary.json").exists()
    assert (out / "manifest.json").exists()
    assert not (out / ".partial").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kind"] == "mu"
    assert summary["estimate"]["n"] == 3
    header = (out / "results.csv").read_text().splitlines()[0]
    assert header == "rep,quantity,value"
    manifest = json.loads((out / "manifest.json").read_text())
    assert "created_utc" in manifest and "config" in manifest


def test_rerun_is_byte_identical_excluding_manifest(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        run_experiment(parse_config(f"kind=mu n=4 reps=3 seed=9 out={out}\n"))
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_thread_count_does_not_change_bytes(tmp_path):
    outs = []
    for threads in (1, 3):
        out = tmp_path / f"t{threads}"
        run_experiment(parse_config(f"kind=mu n=4 reps=4 seed=5 threads={threads} out={out}\n"))
        outs.append((out / "results.csv").read_bytes())
    assert outs[0] == outs[1]


def test_survival_csv_schema(tmp_path):
    out = tmp_path / "surv"
    cfg = parse_config(f"kind=survival cfg=halfaxis:L=8 R=2,4 reps=5 seed=2 out={out}\n")
    assert run_experiment(cfg) == 0
    lines = (out / "results.csv").read_text().splitlines()
    assert lines[0] == "R,survived,reps,p_hat,ci_lo,ci_hi"
    assert len(lines) == 3


def test_survival_horizon_hits_exit_code(tmp_path, capsys):
    out = tmp_path / "hz"
    cfg = parse_config(f"kind=survival cfg=halfaxis:L=8 R=2,4 reps=4 seed=2 horizon=1e-9 out={out}\n")
    assert run_experiment(cfg) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["horizon_hits"] == 4


def test_simulate_emits_event_log(tmp_path):
    out = tmp_path / "sim"
    cfg = parse_config(
        f"kind=simulate cfg=halfaxis:L=4 M=6 rep=0 seed=4 emit-events=true out={out}\n"
    )
    assert run_experiment(cfg) == 0
    lines = (out / "events.csv").read_text().splitlines()
    assert lines[0] == "time,x1,x2,type"
    assert len(lines) > 10
    first = lines[1].split(",")
    assert float(first[0]) == 0.0  # seeds logged at time zero


def test_simulate_without_flag_has_no_event_file(tmp_path):
    out = tmp_path / "sim2"
    run_experiment(parse_config(f"kind=simulate cfg=halfaxis:L=4 M=6 seed=4 out={out}\n"))
    assert not (out / "events.csv").exists()


def test_main_subcommand_smoke(tmp_path):
    out = tmp_path / "cli"
    rc = main(["mu", f"out={out}", "n=4", "reps=2", "seed=1"])
    assert rc == 0
    assert (out / "results.csv").exists()


def test_main_reports_config_errors(tmp_path, capsys):
    rc = main(["mu", "reps=0", "n=4"])
    assert rc == 2
    assert "reps" in capsys.readouterr().err


def test_main_config_file_with_override(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("kind=mu\nn=4\nreps=2\nseed=1\n")
    out = tmp_path / "o"
    rc = main(["mu", "--config", str(cfg_file), f"out={out}", "seed=2"])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert "seed=2" in manifest["config"]


def test_records_modes(tmp_path):
    out = tmp_path / "rp"
    assert run_experiment(parse_config(f"kind=records mode=probability n=3 K=3 reps=4 seed=1 out={out}\n")) == 0
    out2 = tmp_path / "rr"
    assert run_experiment(parse_config(f"kind=records mode=rates t=5 reps=3 seed=1 out={out2}\n")) == 0
    with pytest.raises(ConfigurationError, match="mode"):
        parse_config("kind=records mode=melody reps=3\n")


def test_coexistence_cli(tmp_path):
    out = tmp_path / "co"
    cfg = parse_config(f"kind=coexistence-scan n-list=1,2 R=4 reps=4 seed=1 out={out}\n")
    assert run_experiment(cfg) == 0
    lines = (out / "results.csv").read_text().splitlines()
    assert lines[0] == "n,both_reached,reps,p_hat,ci_lo,ci_hi"


def test_summary_csv_rows(tmp_path):
    out = tmp_path / "sc"
    run_experiment(parse_config(f"kind=descent b=1 W=4 overshoot=1 reps=5 seed=1 out={out}\n"))
    lines = (out / "summary.csv").read_text().splitlines()
    assert lines[0] == "quantity,mean,ci_lo,ci_hi,n"
    names = {ln.split(",")[0] for ln in lines[1:]}
    assert {"confined_mean", "descent_mean"} <= names


def test_named_flags_override_assignments(tmp_path):
    out = tmp_path / "flag"
    rc = main(["mu", "n=4", "reps=2", "--seed", "11", "--out", str(out), "--threads", "2"])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert "seed=11" in manifest["config"]


def test_emit_events_flag(tmp_path):
    out = tmp_path / "ev"
    rc = main(["simulate", "cfg=halfaxis:L=3", "M=4", "--seed", "2", "--out", str(out),
               "--emit-events"])
    assert rc == 0
    assert (out / "events.csv").exists()


def test_manifest_reproduces_results(tmp_path):
    out1 = tmp_path / "m1"
    run_experiment(parse_config(f"kind=mu n=4 reps=3 seed=6 out={out1}\n"))
    manifest = json.loads((out1 / "manifest.json").read_text())
    out2 = tmp_path / "m2"
    cfg = parse_config(manifest["config"], overrides=[f"out={out2}"])
    run_experiment(cfg)
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()
    assert (out1 / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()
