import io
import json
import math
import subprocess
import sys

import pytest

from omegafn.cli import main, parse_q


def run(*argv, env=None):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def value(resp, name="value"):
    v = next(x for x in resp["values"] if x["name"] == name)
    return complex(v["re"], v["im"])


def test_eval_gamma_one():
    code, resp = run_json("eval", "--pot", "d=1", "--k", "0", "--s", "1")
    assert code == 0 and resp["status"] == "ok"
    assert value(resp) == pytest.approx(1, rel=1e-14)


def test_det_warns_about_constant():
    code, resp = run_json("det", "--pot", "d=2", "--s0", "1")
    assert code == 0
    assert value(resp, "delta").real == pytest.approx(-2.5066282746, rel=1e-10)
    assert value(resp, "printed_constant_formula").real == pytest.approx(-math.sqrt(8 * math.pi))
    assert resp["warnings"] and "factor 2" in resp["warnings"][0]
    _, one = run_json("det", "--pot", "d=1", "--s0", "1")
    assert not one["warnings"]


def test_residues():
    code, resp = run_json("residues", "--pot", "d=2", "--n", "4")
    assert code == 0
    assert [value(resp, f"lambda_{i}").real for i in range(5)] == [1, 0, -0.5, 0, 0.125]


def test_pole_exit_code():
    code, resp = run_json("eval", "--pot", "d=2", "--s", "-2")
    assert code == 4 and resp["status"] == "pole"
    assert resp["poles"][0]["n"] == 2 and resp["poles"][0]["residue"]["re"] == -0.5
    code, resp = run_json("ml", "--pot", "d=1", "--s", "0")
    assert code == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--pot", "d=0", "--s", "1"],
        ["eval", "--pot", "d=2;a3=1", "--s", "1"],
        ["eval", "--pot", "d=2", "--s", "one"],
        ["eval", "--pot", "d=2"],
        ["eval", "--pot", "d=2", "--s", "1", "--k", "5"],
        ["eval", "--pot", "d=2", "--s", "1", "--tol", "2"],
        ["reduce", "--pot", "d=2", "--q", "t^x"],
        ["reduce", "--pot", "d=2", "--q", "t + sin(t)"],
        ["bogus"],
    ],
)
def test_input_errors(argv):
    code, _ = run(*argv)
    assert code == 2


def test_negative_complex_arguments():
    code, resp = run_json("eval", "--pot", "d=1", "--s", "-0.5")
    assert value(resp) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-12)
    code, resp = run_json("eval", "--pot", "d=1", "--s", "-1.5+2i")
    assert code == 0


def test_tolerance_env(monkeypatch):
    monkeypatch.setenv("OMEGA_TOL", "1e-6")
    code, resp = run_json("eval", "--pot", "d=3;a1=0.2", "--s", "1.5")
    assert code == 0
    monkeypatch.setenv("OMEGA_TOL", "bad")
    code, _ = run("eval", "--pot", "d=1", "--s", "1")
    assert code == 2


def test_json_roundtrip_is_bit_identical():
    code, text = run("eval", "--pot", "d=3;a1=0.3-0.1i;a2=0.2", "--k", "2", "--s", "0.37-1.21i")
    resp = json.loads(text)
    assert json.dumps(resp) + "\n" == text
    v = resp["values"][0]
    assert float(repr(v["re"])) == v["re"] and float(repr(v["im"])) == v["im"]


def test_other_commands():
    _, r = run_json("incomplete", "--pot", "d=1", "--s", "1", "--z", "1")
    assert value(r) == pytest.approx(1 - 1 / math.e)
    _, r = run_json("ml", "--pot", "d=2", "--s", "1")
    assert value(r) == pytest.approx(math.sqrt(math.pi / 2))
    _, r = run_json("diff", "--pot", "d=2", "--k", "1", "--l", "0", "--s", "1")
    assert value(r) == pytest.approx(-math.sqrt(2 * math.pi))
    _, r = run_json("solve", "--pot", "d=2", "--s0", "1", "--v", "1,1.2533141373155001", "--s", "1")
    assert value(r, "c_0") == pytest.approx(1) and value(r, "f(s)") == pytest.approx(math.sqrt(math.pi / 2))
    _, r = run_json("solve", "--alpha", "0,4", "--v", "1,2")
    assert r["scale"]["re"] == pytest.approx(0.5)


def test_reduce_command():
    code, r = run_json("reduce", "--pot", "d=2", "--q", "t*T", "--s", "1", "--z", "1")
    assert code == 0 and r["reductions"][0]["sigma_shift"] == 1
    assert r["reductions"][0]["A"] == [{"i": 0, "m": 1, "spoly": [[-1.0, 0.0]]}]
    assert value(r) == pytest.approx(0.2490937321795154, rel=1e-12)
    code, r = run_json("reduce", "--pot", "d=2", "--q", "t", "--tpoly", "--s", "1")
    assert value(r, "ray_limit") == pytest.approx(math.sqrt(math.pi / 2))
    code, r = run_json("reduce", "--pot", "d=2", "--q", "T^2", "--s", "1")
    assert code == 2


def test_parse_q():
    assert parse_q("t^3 - 2*t*T + (0.5+1i)") == {(3, 0): 1, (1, 1): -2, (0, 0): 0.5 + 1j}
    assert parse_q("(t+T)**2") == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    assert parse_q("t - t") == {}
    assert parse_q("2i*t") == {(1, 0): 2j}


def test_csv_output():
    code, text = run("residues", "--pot", "d=1", "--n", "2", "--format", "csv")
    rows = [r.split(",") for r in text.splitlines()]
    assert rows[0] == ["name", "re", "im"]
    assert [(n, float(a), float(b)) for n, a, b in rows[1:]] == [("lambda_0", 1, 0), ("lambda_1", -1, 0), ("lambda_2", 0.5, 0)]


def test_batch(tmp_path):
    f = tmp_path / "pts.csv"
    f.write_text("1\n2\n3,0\n4\n5\n0\n-0.5,0.5\n")
    code, text = run("eval", "--pot", "d=1", "--batch", str(f))
    assert code == 0
    rows = text.splitlines()
    assert rows[0].startswith("s_re,s_im,value_re")
    vals = [float(r.split(",")[2]) for r in rows[1:6]]
    assert vals == pytest.approx([1, 1, 2, 6, 24], rel=1e-13)
    pole = rows[6].split(",")
    assert pole[5] == "1" and float(pole[2]) == 1.0
    assert float(rows[7].split(",")[0]) == -0.5


def test_batch_empty_and_bad(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("")
    code, text = run("eval", "--pot", "d=1", "--batch", str(f))
    assert code == 0 and len(text.splitlines()) == 1
    g = tmp_path / "bad.csv"
    g.write_text("1,2,3\n")
    assert run("eval", "--pot", "d=1", "--batch", str(g))[0] == 2
    assert run("eval", "--pot", "d=1", "--batch", str(tmp_path / "missing.csv"))[0] == 2


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "omegafn.cli", "eval", "--pot", "d=1", "--s", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["values"][0]["re"] == pytest.approx(6)


def test_selftest_command():
    code, text = run("selftest", "--scale", "0.1")
    resp = json.loads(text)
    assert code == 0 and len(resp["checks"]) == 9 and all(c["passed"] for c in resp["checks"])
