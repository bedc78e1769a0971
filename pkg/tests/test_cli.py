import json
import subprocess
import sys

import pytest

from discode import cli
from discode.ode import NumericalAbort

SMALL = ["--radial-count", "16", "--angular-count", "64"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def records(text):
    return [json.loads(s) for s in text.splitlines()]


def test_gallery_passes(capsys):
    code, out, _ = run(["gallery", "--entry", "legendre"] + SMALL, capsys)
    recs = records(out)
    assert code == 0 and recs and all(r["passed"] for r in recs)


def test_gallery_with_parameter(capsys):
    assert run(["gallery", "--entry", "thm1_i", "--p", "0.25"] + SMALL, capsys)[0] == 0


@pytest.mark.parametrize("argv", [
    ["gallery", "--entry", "nonesuch"],
    ["gallery", "--entry", "legendre", "--p", "0.2"],
    ["gallery", "--entry", "thm1_i", "--p", "0.7"],
    ["gallery", "--entry", "legendre", "--r-max", "1.0"],
    ["measures", "--entry", "legendre"],
    ["identities", "--points", "5"],
    ["construct", "zeros"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


def test_failed_audit_exits_one(capsys):
    code, out, _ = run(["measures", "--growth", "--entry", "legendre", "--expect", "growing"] + SMALL, capsys)
    assert code == 1 and any(not r["passed"] for r in records(out))


def test_numerical_abort_exits_three(monkeypatch, capsys):
    def boom(args):
        raise NumericalAbort("step size underflow")
    monkeypatch.setitem(cli.COMMANDS, "paths", boom)
    code, _, err = run(["paths", "--target", "0.5"], capsys)
    assert code == 3 and "numerical abort" in err


def test_identities_checks(capsys):
    code, out, _ = run(["identities", "--entry", "legendre", "--points", "40"] + SMALL, capsys)
    assert code == 0 and len(records(out)) > 3
    code, out, _ = run(["identities", "--entry", "log_univalent", "--check", "schwarzian",
                        "--points", "20"] + SMALL, capsys)
    assert code == 0


def test_fd_step_is_second_order_without_richardson(capsys):
    def worst(h):
        _, out, _ = run(["identities", "--entry", "legendre", "--check", "identities", "--points", "50",
                         "--fd-step", h, "--no-richardson"] + SMALL, capsys)
        return max(r["value"] for r in records(out) if "/r1" in r["key"])
    ratio = worst("1e-2") / worst("5e-3")
    assert 3.6 < ratio < 4.4


def test_measures_subcommands(capsys):
    code, out, _ = run(["measures", "--littlewood-paley", "--f", "monomial:1"], capsys)
    assert code == 0
    code, out, _ = run(["measures", "--growth", "--entry", "thm1_ii"] + SMALL, capsys)
    assert code == 0 and any("verdict=growing" in r["key"] for r in records(out))


def test_construct_with_table_output(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("0.5 0 neutral\n0 -0.5 attractive\n")
    out_file = tmp_path / "report.csv"
    code, out, _ = run(["construct", "fixed-typed", "--spec", str(spec), "--format", "table",
                        "--output", str(out_file)] + SMALL, capsys)
    assert code == 0 and out == ""
    assert out_file.read_text().startswith("key,quantity,value,tolerance,passed,anchor\n")


def test_construct_reports_bad_input_file(tmp_path, capsys):
    z = tmp_path / "z.txt"
    z.write_text("0.5 0\nhello\n")
    code, _, err = run(["construct", "fixed-simple", "--zeros", str(z)] + SMALL, capsys)
    assert code == 2 and "z.txt:2" in err


def test_paths(tmp_path, capsys):
    ex = tmp_path / "ex.txt"
    ex.write_text("0.4 0 0.1\n")
    trace = tmp_path / "path.json"
    code, out, _ = run(["paths", "--target", "0.8", "--exclusions", str(ex), "--trace", str(trace)], capsys)
    assert code == 0 and trace.read_text().strip()
    assert {r["key"] for r in records(out)} == {"path/violations", "path/length"}


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"radial-count": 16, "angular_count": 64, "format": "table"}))
    code, out, _ = run(["gallery", "--entry", "legendre", "--config", str(cfg)], capsys)
    assert code == 0 and out.startswith("key,")
    # flags on the command line win over the file
    code, out, _ = run(["gallery", "--entry", "legendre", "--config", str(cfg), "--format", "jsonl"], capsys)
    assert code == 0 and out.startswith("{")


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"radial-count": 16, "colour": "red"}))
    code, _, err = run(["gallery", "--entry", "legendre", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in err


def test_output_is_deterministic(capsys):
    a = run(["measures", "--coefficient-carleson", "--entry", "legendre"] + SMALL, capsys)
    b = run(["measures", "--coefficient-carleson", "--entry", "legendre"] + SMALL, capsys)
    assert a == b and a[1]


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "discode", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "gallery" in r.stdout
