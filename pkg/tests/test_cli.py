import csv
import io
import json
import subprocess
import sys

import pytest

from lampkernel.cli import main


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_dimension_headline_with_certificate():
    code, out, _ = run(["dimension", "--f", "2", "--m", "4", "--certify"])
    assert code == 0
    doc = json.loads(out)
    assert abs(float(doc["result"]["value"]) - 0.850971) < 1e-6
    rat = doc["result"]["rationality"]
    assert rat["kind"] == "irrational_certified"
    assert len(rat["minimal_polynomial"]["coeffs_ascending"]) == 4
    assert doc["config"]["k_resolved"] == 3
    for key in ("schema", "tool_version", "config", "seed", "input_hash", "violations"):
        assert key in doc


def test_f_and_k_agree():
    _, a, _ = run(["dimension", "--f", "2", "--m", "5"])
    _, b, _ = run(["dimension", "--k", "3", "--m", "5"])
    assert json.loads(a)["result"] == json.loads(b)["result"]


def test_genfun_csv():
    code, out, _ = run(["genfun", "--k", "3", "--order", "8", "--check-bruteforce"])
    assert code == 0
    assert out.startswith("n,g_n,count_n,oracle_match\r\n")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8
    assert all(r["oracle_match"] == "True" for r in rows)
    assert rows[2] == {"n": "3", "g_n": rows[2]["g_n"], "count_n": "18", "oracle_match": "True"}


def test_genfun_out_dir(tmp_path):
    code, out, _ = run(["genfun", "--k", "1", "--order", "6", "--out", str(tmp_path)])
    assert code == 0 and out == ""
    doc = json.loads((tmp_path / "genfun.json").read_text())
    assert [r["g_n"] for r in doc["result"]["rows"]] == [1, 0, 3, 0, 5, 0]
    assert (tmp_path / "genfun.csv").read_bytes().startswith(b"n,g_n,count_n\r\n")


def test_mc_byte_identical():
    argv = ["mc", "--k", "1", "--m", "2", "--samples", "1000", "--seed", "7"]
    _, a, _ = run(argv)
    _, b, _ = run(argv)
    assert a == b
    doc = json.loads(a)
    assert doc["seed"] == 7 and doc["result"]["samples"] == 1000


def test_mc_threads_do_not_change_output():
    base = ["mc", "--k", "3", "--m", "5", "--samples", "9000", "--seed", "3"]
    _, a, _ = run(base + ["--threads", "1"])
    _, b, _ = run(base + ["--threads", "2"])
    assert a == b


def test_mc_histogram(tmp_path):
    code, _, _ = run(["mc", "--k", "3", "--m", "4", "--samples", "2000", "--bins", "16", "--out", str(tmp_path)])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "histogram.csv").read_bytes().decode())))
    assert len(rows) == 16 and list(rows[0]) == ["bin_lo", "bin_hi", "mass"]
    assert abs(sum(float(r["mass"]) for r in rows) - 1) < 1e-12
    doc = json.loads((tmp_path / "mc.json").read_text())
    assert doc["violations"] == []


def test_enumerate_stream():
    code, out, err = run(["enumerate", "--k", "3", "--n-max", "2"])
    assert code == 0
    assert out.splitlines() == ["1", "(0001)", "(0010)", "(0100)", "(1000)"]
    assert "5 animals" in err


def test_freeproduct_report():
    code, out, _ = run(["freeproduct", "--orders", "6,6", "--m", "4", "--samples", "300", "--seed", "1"])
    assert code == 0
    rep = json.loads(out)["result"]["invariant_report"]
    assert rep["critical_polynomial"]["ok"] and rep["matching_rank_mismatches"] == 0


def test_verify():
    code, out, _ = run(["verify", "--k", "2", "--k", "3"])
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["2"]["ok"] and doc["result"]["3"]["ok"]


@pytest.mark.parametrize(
    "argv",
    [
        ["dimension", "--k", "3", "--m", "3"],
        ["dimension", "--k", "3", "--f", "2", "--m", "5"],
        ["dimension", "--m", "5"],
        ["mc", "--k", "1", "--m", "2", "--samples", "0"],
        ["freeproduct", "--m", "2"],
        ["freeproduct", "--m", "4", "--orders", "6"],
        ["nosuch"],
    ],
)
def test_usage_errors_exit_2(argv):
    code, _, _ = run(argv)
    assert code == 2


def test_computation_error_exit_1():
    code, out, _ = run(["enumerate", "--k", "3", "--n-max", "6", "--cap", "10"])
    assert code == 1
    assert json.loads(out)["error"]["type"] == "AnimalCapExceeded"


def test_reproduce_single_criterion():
    code, out, _ = run(["reproduce", "--only", "A2", "--json"])
    assert code == 0
    doc = json.loads(out)
    assert [c["id"] for c in doc["criteria"]] == ["A2"] and doc["criteria"][0]["passed"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lampkernel.cli", "dimension", "--k", "1", "--m", "2", "--certify"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["rationality"]["value"] == "2/3"
