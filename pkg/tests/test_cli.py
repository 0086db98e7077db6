"""Command-line interface: config handling, dataset output, exit codes."""

import json

import pytest

from kitaevqfi.cli import ConfigError, load_config, main, serialize_config


def run(args):
    return main(args)


def strip_timestamp(path):
    lines = path.read_text().splitlines()
    return [ln for ln in lines if not ln.startswith("# timestamp")]


def test_load_config_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("length = 40\nfield = 0.3   # operating point\n\ngamma = 0.8\n")
    parsed = load_config(str(cfg))
    assert parsed == {"length": "40", "field": "0.3", "gamma": "0.8"}
    cfg2 = tmp_path / "run2.cfg"
    cfg2.write_text(serialize_config(parsed))
    assert load_config(str(cfg2)) == parsed


def test_duplicate_key_error_names_key_and_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("length = 40\nlength = 50\n")
    with pytest.raises(ConfigError, match=r"bad\.cfg:2.*length"):
        load_config(str(cfg))


def test_malformed_line_reports_line_number(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("length = 40\nnot a pair\n")
    with pytest.raises(ConfigError, match=":2"):
        load_config(str(cfg))


def test_unknown_config_key_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    out = tmp_path / "o.csv"
    code = run(["asymmetry", "--config", str(cfg), "-o", str(out)])
    assert code == 2
    assert not out.exists()


def test_flag_overrides_config_value(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("length = 30\nfield = 0.3\n")
    out = tmp_path / "a.csv"
    code = run(["asymmetry", "--config", str(cfg), "--field", "0.7",
                "--t-min", "40", "--t-max", "50", "-o", str(out)])
    assert code == 0
    header = out.read_text()
    assert "# length = 30" in header
    assert "# field = 0.69999999999999996" in header


def test_rerun_is_byte_identical_except_timestamp(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["site-scan", "-L", "40", "--t-min", "40", "--t-max", "60",
            "--k-max", "4"]
    assert run(args + ["-o", str(a)]) == 0
    assert run(args + ["-o", str(b)]) == 0
    assert strip_timestamp(a) == strip_timestamp(b)


def test_csv_is_self_describing(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["asymmetry", "-L", "30", "--seed", "7", "--t-min", "40",
                "--t-max", "50", "-o", str(out)]) == 0
    text = out.read_text()
    for key in ("subcommand", "seed = 7", "length = 30", "hopping",
                "gamma", "field", "t_min", "t_max", "dt",
                "tool_version", "timestamp"):
        assert key in text
    header_lines = [ln for ln in text.splitlines() if ln.startswith("#")]
    data_lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert data_lines[0] == "channel,mean_qfi"
    assert len(data_lines) == 3
    assert header_lines


def test_json_output_structure(tmp_path):
    out = tmp_path / "a.json"
    assert run(["asymmetry", "-L", "30", "--t-min", "40", "--t-max", "50",
                "--format", "json", "-o", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"metadata", "records"}
    assert payload["metadata"]["subcommand"] == "asymmetry"
    assert len(payload["records"]) == 2
    assert {r["channel"] for r in payload["records"]} == {"y", "x"}


def test_velocity_subcommand(tmp_path):
    out = tmp_path / "v.csv"
    assert run(["velocity", "-L", "120", "--gamma", "0", "--t-fit-max", "40",
                "-o", str(out)]) == 0
    last = out.read_text().splitlines()[-1]
    v = float(last.split(",")[1])
    assert abs(v - 2.0) < 0.2


def test_verify_passes_on_clean_build(capsys):
    assert run(["verify", "--seed", "11"]) == 0
    printed = capsys.readouterr().out
    assert printed.count("[PASS]") == 4
    assert "[FAIL]" not in printed


def test_numerical_failure_exit_code(tmp_path):
    # Flat band: no wavefront exists, reported as a numerical failure.
    out = tmp_path / "v.csv"
    code = run(["velocity", "-L", "60", "--gamma", "1", "--field", "0",
                "--t-fit-max", "30", "-o", str(out)])
    assert code == 1


def test_invalid_value_usage_error(tmp_path):
    out = tmp_path / "a.csv"
    code = run(["asymmetry", "-L", "30", "--t-min", "50", "--t-max", "40",
                "-o", str(out)])
    assert code == 2
