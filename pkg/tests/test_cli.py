import csv
import io

import pytest

from combderate.cli import UsageError, main, parse_sweep


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    lines = text.splitlines()
    assert lines[0].startswith("# combderate ")
    body = [ln for ln in lines if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_parse_sweep():
    assert parse_sweep("4:32:4") == [4, 8, 12, 16, 20, 24, 28, 32]
    assert parse_sweep("4:30:4") == [4, 8, 12, 16, 20, 24, 28]
    assert parse_sweep("4,8,16") == [4, 8, 16]
    assert parse_sweep("7") == [7]
    for bad in ("", "8:4:1", "4:8:0", "a:b", "8,4", "1:4:1"):
        with pytest.raises(UsageError):
            parse_sweep(bad)


def test_coeffs_single_row(capsys):
    code, out, _ = run(capsys, "coeffs", "--order", "4")
    assert code == 0
    assert table(out) == [{"N": "4", "b_num": "4", "b_den": "1", "A": "1", "taps": "(1,4,1)", "norm": "6", "W_b": "3"}]


def test_coeffs_all(capsys):
    code, out, _ = run(capsys, "coeffs", "--all")
    rows = table(out)
    assert code == 0 and len(rows) == 11
    assert rows[4]["taps"] == "(5,14,5)"


@pytest.mark.parametrize("order, msg", [("12", "order out of validity range (N < 12)"), ("0", "pure delay")])
def test_coeffs_invalid(capsys, order, msg):
    code, out, err = run(capsys, "coeffs", "--order", order)
    assert code == 2 and msg in err and out == ""


def test_deviation_default(capsys):
    code, out, _ = run(capsys, "deviation", "--order", "3")
    rows = table(out)
    assert code == 0 and [r["M"] for r in rows] == [str(m) for m in range(4, 33, 4)]
    und = [float(r["deviation_db_underated"]) for r in rows]
    der = [float(r["deviation_db_derated"]) for r in rows]
    assert all(a > b for a, b in zip(und, und[1:]))
    assert all(abs(d) <= 0.002 for d in der)
    assert len(rows[0]["deviation_db_derated"].split(".")[1]) == 6


def test_deviation_sharpened(capsys):
    _, out, _ = run(capsys, "deviation", "--sharpened")
    rows = table(out)
    assert set(rows[0]) == {"M", "deviation_db_sharpened", "deviation_db_sharpened_derated"}
    _, out2, _ = run(capsys, "sharpen")
    assert table(out2) == rows


def test_deviation_cascade(capsys):
    _, out, _ = run(capsys, "deviation", "--cascade", "3+1")
    rows = table(out)
    for r in rows:
        assert float(r["deviation_db_cascade"]) >= float(r["deviation_db_conventional_3"])
    _, out2, _ = run(capsys, "cascade", "--preset", "3+1")
    assert table(out2) == rows


def test_deviation_bad_sweep(capsys):
    code, _, err = run(capsys, "deviation", "--m", "32:4:4")
    assert code == 2 and "sweep" in err


def test_response_limit(capsys):
    code, out, _ = run(capsys, "response", "--order", "3", "--m", "4", "--limit", "--grid", "16")
    rows = table(out)
    assert code == 0
    assert list(rows[0]) == ["omega_over_pi", "mag_db_underated", "mag_db_limit"]
    assert float(rows[-1]["omega_over_pi"]) == pytest.approx(4.0)
    assert len(rows) == 16 * 4 + 1


def test_response_dc_row_is_zero(capsys):
    for argv in (
        ("response", "--order", "5", "--m", "8", "--grid", "4"),
        ("response", "--sharpened", "--m", "8", "--grid", "4"),
        ("response", "--cascade", "2+0", "--m", "8", "--grid", "4"),
        ("response", "--compensate", "--order", "3", "--m", "4", "--two-stage", "both", "--grid", "4"),
    ):
        code, out, _ = run(capsys, *argv)
        first = table(out)[0]
        assert code == 0
        assert all(float(v) == 0.0 for v in first.values()), argv


def test_response_compensate_columns_and_warning(capsys):
    _, out, _ = run(capsys, "response", "--compensate", "--order", "3", "--m", "4", "--two-stage", "both", "--grid", "4")
    assert "# warning: 3-tap maximally flat compensator" in out
    assert list(table(out)[0]) == ["omega_over_pi", "mag_db_single_stage", "mag_db_two_stage"]
    _, out, _ = run(capsys, "response", "--compensate", "--l", "8", "--m", "4", "--grid", "4")
    assert "warning" not in out


def test_response_invalid_variant(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["response", "--cascade", "5+5"])
    assert exc.value.code == 2
    code, _, _ = run(capsys, "response", "--sharpened", "--limit")
    assert code == 2


def test_compensate_table(capsys):
    code, out, _ = run(capsys, "compensate", "--order", "3", "--m", "4,8")
    rows = table(out)
    assert code == 0
    assert float(rows[0]["c0_single"]) == -15 / 128
    assert float(rows[1]["c0_two_stage"]) == -1 / 8


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["deviation", "--order", "4", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("# combderate deviation ")


def write_lines(path, values):
    path.write_text("".join(f"{v}\n" for v in values))
    return str(path)


def test_simulate_impulse(tmp_path, capsys):
    src = write_lines(tmp_path / "in.txt", [1] + [0] * 15)
    report = tmp_path / "report.txt"
    code, out, _ = run(capsys, "simulate", "--order", "1", "--m", "4", "--derated", "--in", src, "--report", str(report))
    assert code == 0
    assert out.split() == ["24", "0", "0", "0"]
    text = report.read_text()
    assert "gain: 96" in text and "oracle_match: true" in text and "total_bits: 23" in text


def test_simulate_constant(tmp_path, capsys):
    src = write_lines(tmp_path / "in.txt", [5] * 30)
    dst = tmp_path / "out.txt"
    code, _, err = run(capsys, "simulate", "--order", "2", "--m", "3", "--underated", "--in", src, "--out", str(dst))
    assert code == 0 and "oracle_match: true" in err
    assert dst.read_text().split()[-1] == "45"


def test_simulate_out_of_range(tmp_path, capsys):
    src = write_lines(tmp_path / "in.txt", [0, 40000])
    code, _, err = run(capsys, "simulate", "--in", src)
    assert code == 3 and "does not fit" in err
    src = write_lines(tmp_path / "bad.txt", ["x"])
    assert run(capsys, "simulate", "--in", src)[0] == 3


def test_simulate_invalid_order(capsys):
    assert run(capsys, "simulate", "--order", "12")[0] == 2


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "7")
    assert code == 0
    for name in ("table1", "slope-law", "oracle-equivalence", "stopband-dominance"):
        assert f"[PASS] {name}" in out
    code2, out2, _ = run(capsys, "selftest", "--seed", "7")
    assert out2 == out
    assert run(capsys, "selftest", "--suite", "nope")[0] == 2


def test_selftest_failure_exit(monkeypatch, capsys):
    from combderate import selftest

    monkeypatch.setitem(selftest.SUITES, "table1", lambda rng: (False, "forced"))
    code, out, _ = run(capsys, "selftest", "--suite", "table1")
    assert code == 1 and "[FAIL] table1: forced" in out
