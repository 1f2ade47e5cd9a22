import csv
import io
import json
import subprocess
import sys

import pytest

from spiralrad.cli import main, parse_axis


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_radius_json(capsys):
    code, out, _ = run(capsys, "radius", "--family", "wright", "--norm", "g", "--kappa", "1", "--delta", "2",
                       "--gamma", "0", "--alpha", "0", "--kind", "spirallike", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["radius"] == pytest.approx(0.9205918907, abs=1e-9)
    assert data["params"] == {"kappa": 1.0, "delta": 2.0}
    assert data["certification"] == "sharp_at_gamma0"
    lo, hi = data["bracket"]
    assert lo < data["radius"] < hi
    for key in ("family", "norm", "kind", "gamma", "alpha", "residual"):
        assert key in data


def test_radius_plain_legendre(capsys):
    code, out, _ = run(capsys, "radius", "--family", "legendre", "--n", "2", "--gamma", "0", "--alpha", "0",
                       "--kind", "spirallike")
    assert code == 0
    line = next(x for x in out.splitlines() if x.startswith("radius:"))
    assert float(line.split()[1]) == pytest.approx(0.4472135955, abs=1e-10)


def test_zeros_struve(capsys):
    code, out, _ = run(capsys, "zeros", "--family", "struve", "--beta", "0.5", "--count", "2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["kernel_zeros"] == pytest.approx([6.2831853072, 12.5663706144], abs=1e-9)
    assert "interlacing" in data and len(data["derivative_zeros"]) == 2


def test_zeros_interlacing_verdict(capsys):
    code, out, _ = run(capsys, "zeros", "--family", "ramanujan", "--beta", "1", "--p", "0.5", "--c", "1",
                       "--norm", "f", "--json")
    assert code == 0 and json.loads(out)["interlacing"] is True


def test_round_trip(capsys, tmp_path):
    argv = ["radius", "--family", "mittag-leffler", "--mu", "3", "--nu", "1", "--a", "1", "--norm", "h",
            "--kind", "convex", "--gamma", "0.4", "--alpha", "0.2", "--tol", "1e-12", "--json"]
    _, out, _ = run(capsys, *argv)
    first = json.loads(out)
    saved = tmp_path / "run.json"
    saved.write_text(out)
    code, out, _ = run(capsys, "radius", "--params-json", str(saved), "--json")
    assert code == 0
    second = json.loads(out)
    assert second["radius"] == first["radius"]
    assert second == first
    # inline JSON works too
    _, out, _ = run(capsys, "radius", "--params-json", json.dumps(first), "--json")
    assert json.loads(out)["radius"] == first["radius"]


def test_degrees(capsys):
    _, a, _ = run(capsys, "radius", "--family", "wright", "--kappa", "1", "--delta", "2", "--gamma", "60",
                  "--degrees", "--alpha", "0.5", "--json", "--no-certify")
    _, b, _ = run(capsys, "radius", "--family", "wright", "--kappa", "1", "--delta", "2", "--gamma",
                  "1.0471975511965976", "--alpha", "0.5", "--json", "--no-certify")
    assert json.loads(a)["radius"] == json.loads(b)["radius"]


def test_paper_literal_flag(capsys):
    base = ["radius", "--family", "legendre", "--n", "2", "--gamma", "0.5", "--alpha", "0.2", "--json", "--no-certify"]
    _, a, _ = run(capsys, *base)
    _, b, _ = run(capsys, *base, "--paper-literal-legendre")
    assert json.loads(a)["radius"] != json.loads(b)["radius"]
    assert json.loads(b)["paper_literal_legendre"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["radius", "--family", "lommel", "--u", "0"],
        ["radius", "--family", "wright", "--kappa", "1"],
        ["radius", "--family", "legendre", "--n", "2", "--norm", "h"],
        ["radius", "--family", "legendre", "--n", "2.5"],
        ["radius", "--family", "wright", "--kappa", "1", "--delta", "2", "--gamma", "2"],
        ["radius", "--family", "wright", "--kappa", "1", "--delta", "2", "--beta", "1"],
        ["radius", "--family", "mittag-leffler", "--mu", "1.5", "--nu", "1", "--a", "1"],
        ["radius", "--family", "nope"],
        ["radius", "--bogus"],
        ["sweep", "--family", "struve", "--beta", "0.3", "--grid", "kappa=0:1:3"],
    ],
)
def test_invalid_requests_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1 and "error" in json.loads(lines[0])


def test_solver_failure_exit_3(capsys):
    code, _, err = run(capsys, "radius", "--family", "legendre", "--n", "1")
    assert code == 3
    assert json.loads(err)["error"] == "SolverError"


def test_assume_real_zeros_override(capsys):
    code, out, _ = run(capsys, "radius", "--family", "mittag-leffler", "--mu", "1.5", "--nu", "1", "--a", "1",
                       "--assume-real-zeros", "--json", "--no-certify")
    assert code == 0 and json.loads(out)["assume_real_zeros"] is True


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--family", "wright", "--kappa", "1", "--delta", "2", "--json")
    data = json.loads(out)
    assert code == 0 and data["disk"] == "disk_valid"
    assert data["empirical_radius"] == pytest.approx(data["radius"], abs=1e-6)


def test_sweep_csv_order_and_shape(capsys, monkeypatch):
    monkeypatch.setenv("SPIRALRAD_THREADS", "3")
    code, out, _ = run(capsys, "sweep", "--family", "struve", "--beta", "0.3",
                       "--grid", "gamma=0:1:3", "--grid", "alpha=0.6,0")
    assert code == 0
    assert "\r\n" in out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0])[:5] == ["gamma", "alpha", "radius", "residual", "certified"]
    keys = [(float(r["gamma"]), float(r["alpha"])) for r in rows]
    assert keys == [(g, a) for g in (0.0, 0.5, 1.0) for a in (0.6, 0.0)]
    assert all(r["certified"] == "True" for r in rows)


def test_sweep_family_parameter_with_bad_points(capsys, tmp_path):
    out_file = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", "--family", "lommel", "--u", "0.3", "--grid", "u=-0.5:0.5:5",
                       "--out", str(out_file))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(out_file.open(newline="")))
    assert [float(r["u"]) for r in rows] == [-0.5, -0.25, 0.0, 0.25, 0.5]
    assert rows[2]["radius"] == "" and "InvalidParameters" in rows[2]["error"]
    assert float(rows[3]["radius"]) > 0


def test_sweep_is_deterministic(capsys):
    argv = ["sweep", "--family", "wright", "--kappa", "1", "--delta", "2", "--grid", "alpha=0:0.8:5",
            "--format", "json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_parse_axis():
    assert parse_axis("gamma=0:1:3") == ("gamma", [0.0, 0.5, 1.0])
    name, values = parse_axis("gamma=0,90", degrees=True)
    assert values[1] == pytest.approx(1.5707963267948966)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spiralrad", "zeros", "--family", "legendre", "--n", "2",
                           "--count", "1", "--json"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["kernel_zeros"][0] == pytest.approx(0.7745966692, abs=1e-10)
