import io
import os
import re

import pytest

from qklauder import cli, observables


def run(argv):
    buf = io.StringIO()
    code = cli.main(argv, stdout=buf)
    return code, buf.getvalue()


def parse_kv(text):
    out = {}
    for line in text.splitlines():
        k, _, v = line.partition("=")
        out[k.strip()] = v.strip()
    return out


def test_verify_passes():
    code, text = run(["verify"])
    assert code == cli.EXIT_OK
    assert "checks passed" in text
    assert "FAIL" not in text


@pytest.mark.parametrize(
    "argv",
    [
        ["revival-times", "--q", "1.5"],
        ["revival-times", "--q", "0"],
        ["revival-times", "--q", "0.9", "--tau", "0.1"],
        ["revival-times", "--tau", "-1"],
        ["autocorr", "--steps", "1"],
        ["autocorr", "--t-min", "5", "--t-max", "5"],
        ["uncertainty", "--hbar", "0"],
        ["uncertainty", "--J", "-1"],
        ["autocorr", "--workers", "0"],
        ["autocorr", "--out", "/nonexistent/dir/x.csv"],
    ],
)
def test_invalid_configuration_exit_code(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = cli.main(argv, stdout=io.StringIO())
        raise SystemExit(code)
    assert info.value.code == cli.EXIT_CONFIG


def test_unknown_subcommand_exits_config():
    with pytest.raises(SystemExit) as info:
        cli.main(["nope"])
    assert info.value.code == cli.EXIT_CONFIG


def test_revival_times_at_q_one_is_config_error(capsys):
    code, _ = run(["revival-times", "--q", "1"])
    assert code == cli.EXIT_CONFIG


@pytest.mark.parametrize("cmd", ["autocorr", "uncertainty", "expect", "revival-times"])
def test_divergent_action_exit_code(cmd, tmp_path, capsys):
    out = tmp_path / "o.csv"
    code, text = run([cmd, "--q", "0.5", "--J", "6", "--out", str(out)])
    assert code == cli.EXIT_NUMERIC
    assert text == ""
    assert not out.exists()
    assert "numerical error" in capsys.readouterr().err


def test_revival_times_defaults():
    code, text = run(["revival-times"])
    assert code == 0
    kv = parse_kv(text)
    assert float(kv["T_cl"]) == pytest.approx(6.65, abs=0.01)
    assert float(kv["T_rev"]) == pytest.approx(1330.19, abs=0.01)
    assert float(kv["n_bar"]) == pytest.approx(6.1875, abs=0.005)


def test_autocorr_first_row(tmp_path):
    out = tmp_path / "ac.csv"
    code, _ = run(["autocorr", "--t-max", "10", "--steps", "11", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,re,im,abs2"
    assert len(lines) == 12
    assert float(lines[1].split(",")[3]) == pytest.approx(1.0, abs=1e-14)


def test_uncertainty_scan_rows():
    code, text = run(["uncertainty", "--t-max", "30", "--steps", "61"])
    assert code == 0
    lines = text.splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, map(float, l.split(",")))) for l in lines[1:]]
    assert abs(rows[0]["ratio"] - 1.0) <= 1e-9
    assert all(r["ratio"] >= 1 - 1e-9 for r in rows)
    assert len({r["bound"] for r in rows}) == 1


def test_expect_at_zero_angle():
    code, text = run(["expect", "--gamma", "0"])
    assert code == 0
    kv = parse_kv(text)
    assert float(kv["<P>"]) == 0.0
    assert float(kv["<H>"]) == pytest.approx(6.0, abs=1e-10)
    assert "<A+AA+>" in kv


@pytest.mark.parametrize("cmd", ["autocorr", "uncertainty"])
def test_csv_output_is_deterministic(cmd, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run([cmd, "--t-max", "50", "--steps", "301", "--out", str(a)])
    run([cmd, "--t-max", "50", "--steps", "301", "--out", str(b), "--workers", "3"])
    assert a.read_bytes() == b.read_bytes()


def test_autocorr_svg(tmp_path):
    svg = tmp_path / "ac.svg"
    code, text = run(["autocorr", "--steps", "50", "--svg", str(svg)])
    assert code == 0
    assert text.startswith("t,re,im,abs2")
    assert svg.read_text().startswith("<svg")


def test_plot_round_trip(tmp_path):
    csv = tmp_path / "ac.csv"
    svg = tmp_path / "ac.svg"
    run(["autocorr", "--steps", "20", "--out", str(csv)])
    code, _ = run(["plot", str(csv), "--columns", "t,abs2", "--svg", str(svg)])
    assert code == 0
    assert "<polyline" in svg.read_text()


def test_plot_empty_csv_writes_nothing(tmp_path, capsys):
    csv = tmp_path / "empty.csv"
    csv.write_text("")
    svg = tmp_path / "x.svg"
    code, _ = run(["plot", str(csv), "--svg", str(svg)])
    assert code == cli.EXIT_CONFIG
    assert not svg.exists()


def test_plot_two_points_single_segment(tmp_path):
    csv = tmp_path / "two.csv"
    csv.write_text("x,y\n0,0\n1,1\n")
    svg = tmp_path / "two.svg"
    assert run(["plot", str(csv), "--svg", str(svg)])[0] == 0
    text = svg.read_text()
    m = re.search(r'<polyline[^>]* points="([^"]*)"', text)
    pts = m.group(1).split()
    assert len(pts) == 2


@pytest.mark.parametrize(
    "content,columns",
    [("x,y\n0,0\n", None), ("x,y\n0,a\n1,2\n", None), ("x,y\n0,0\n1,1\n", "x,z"), ("x,y\n0,0\n1,1\n", "x")],
)
def test_plot_bad_input(tmp_path, content, columns, capsys):
    csv = tmp_path / "bad.csv"
    csv.write_text(content)
    svg = tmp_path / "bad.svg"
    argv = ["plot", str(csv), "--svg", str(svg)] + (["--columns", columns] if columns else [])
    assert run(argv)[0] == cli.EXIT_CONFIG
    assert not svg.exists()


def test_injected_fault_fails_verify(monkeypatch, capsys):
    real = observables.lhs_closed_form

    def broken(s, scales, g=None):
        return real(s, scales, g) * (1 + 1e-6)

    monkeypatch.setattr(observables, "lhs_closed_form", broken)
    code, text = run(["verify"])
    assert code == cli.EXIT_INVARIANT
    assert "closed-form/variance consistency" in text.splitlines()[-1]


def test_invalid_config_never_writes(tmp_path):
    out = tmp_path / "o.csv"
    with pytest.raises(SystemExit):
        cli.main(["autocorr", "--q", "2", "--tau", "1", "--out", str(out)])
    assert run(["autocorr", "--steps", "0", "--out", str(out)])[0] == cli.EXIT_CONFIG
    assert os.listdir(tmp_path) == []
