import json
import math

import numpy as np
import pytest

from discode.records import (
    AuditRow, all_passed, read_points, read_typed_points, render, row_dict, to_jsonl, to_table,
)


def test_row_constructors():
    assert AuditRow.upper("k", "q", 1e-12, 1e-10, "a").passed
    assert not AuditRow.upper("k", "q", 1e-9, 1e-10, "a").passed
    assert not AuditRow.upper("k", "q", float("nan"), 1e-10, "a").passed
    assert AuditRow.lower("k", "q", 2.0, 1.0, "a").passed
    assert not AuditRow.lower("k", "q", 0.5, 1.0, "a").passed
    info = AuditRow.info("k", "q", 3.0, "a")
    assert info.passed and math.isinf(info.tolerance)
    assert not AuditRow.info("k", "q", float("nan"), "a").passed


def test_jsonl_is_sorted_and_parses():
    rows = [AuditRow.upper("b", "q", 1.0, 2.0, "x"), AuditRow.info("a", "q", float("inf"), "y")]
    lines = to_jsonl(rows).splitlines()
    recs = [json.loads(s) for s in lines]
    assert [r["key"] for r in recs] == ["a", "b"]
    assert recs[0]["value"] == "inf" and recs[1]["tolerance"] == 2.0
    assert AuditRow.from_dict(recs[1]) == rows[0]


def test_from_dict_accepts_claim_field():
    d = dict(key="k", quantity="q", value=1, tolerance=2, passed=True, claim="c")
    assert AuditRow.from_dict(d).anchor == "c"


def test_table_layout_and_round_trip_precision():
    v = 0.1 + 0.2
    text = to_table([AuditRow.upper("k", "q, with comma", v, 1.0, "a")])
    header, line = text.splitlines()
    assert header == "key,quantity,value,tolerance,passed,anchor"
    assert '"q, with comma"' in line and float(line.split(",")[3]) == v


def test_render_and_all_passed():
    rows = [AuditRow.upper("k", "q", 0.0, 1.0, "a")]
    assert render(rows) == to_jsonl(rows) and render(rows, "table") == to_table(rows)
    with pytest.raises(ValueError):
        render(rows, "xml")
    assert all_passed(rows) and all_passed([])
    assert not all_passed(rows + [AuditRow.upper("k", "q", 2.0, 1.0, "a")])
    assert set(row_dict(rows[0])) == {"key", "quantity", "value", "tolerance", "passed", "anchor"}


def test_read_points(tmp_path):
    p = tmp_path / "pts.txt"
    p.write_text("# header\n0.5 0\n\n-0.1 0.3  # trailing\n")
    assert np.array_equal(read_points(p), [0.5, -0.1 + 0.3j])


@pytest.mark.parametrize("body, line, what", [
    ("0.5 0\n0.1\n", 2, "expected"),
    ("0.5 zero\n", 1, "not a number"),
])
def test_read_points_errors_name_the_line(tmp_path, body, line, what):
    p = tmp_path / "bad.txt"
    p.write_text(body)
    with pytest.raises(ValueError, match=f"bad.txt:{line}: {what}"):
        read_points(p)


def test_read_typed_points(tmp_path):
    p = tmp_path / "spec.txt"
    p.write_text("0.5 0 neutral\n0 -0.5 attractive\n")
    z, t = read_typed_points(p)
    assert np.array_equal(z, [0.5, -0.5j]) and t == ["neutral", "attractive"]
    p.write_text("0.5 0\n")
    with pytest.raises(ValueError, match="spec.txt:1"):
        read_typed_points(p)
