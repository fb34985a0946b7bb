import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from kmul import cli, fileformat, tensor
from kmul.field import field

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


@pytest.mark.parametrize("q,n,k,rank", [("5", 2, 2, 3), ("2", 1, 4, 1), ("2^2", 3, 2, 5)])
def test_build_writes_verified_file(tmp_path, q, n, k, rank):
    path = tmp_path / "d.json"
    code, text = call("build", "--q", q, "--n", str(n), "--k", str(k), "--out", str(path))
    assert code == 0
    assert f"rank       {rank}" in text
    dec, prov = fileformat.load(path)
    assert dec.rank == rank and tensor.verify(dec)
    assert prov["mode"] == "recursive"


def test_build_rank_without_infinity(tmp_path):
    code, text = call("build", "--q", "2", "--n", "3", "--k", "2", "--no-infinity")
    assert code == 0 and "rank       8" in text


def test_build_golden_file(tmp_path):
    path = tmp_path / "d.json"
    assert call("build", "--q", "5", "--n", "2", "--k", "2", "--out", str(path))[0] == 0
    assert path.read_bytes() == (GOLDEN / "build_q5_n2_k2.json").read_bytes()


def test_build_usage_errors():
    assert call("build", "--q", "6", "--n", "2", "--k", "2")[0] == 2
    assert call("build", "--q", "2", "--n", "0", "--k", "2")[0] == 2
    assert call("build", "--q", "2", "--n", "2", "--k", "1")[0] == 2
    assert call("build", "--q", "2", "--n", "30", "--k", "3", "--budget", "10")[0] == 2


def test_verify_pass_and_corruption(tmp_path):
    path = tmp_path / "d.json"
    call("build", "--q", "3", "--n", "3", "--k", "2", "--out", str(path))
    code, text = call("verify", str(path))
    assert code == 0 and text.startswith("ok")
    d = json.loads(path.read_text())
    d["terms"][0]["output"][0] = (d["terms"][0]["output"][0] + 1) % 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    code, text = call("verify", str(bad))
    assert code == 1 and "first mismatch at basis tuple" in text


@pytest.mark.parametrize(
    "content",
    ["{", "[]", '{"format": 1}', '{"format": 9, "p": 2}'],
)
def test_verify_malformed(tmp_path, content):
    path = tmp_path / "m.json"
    path.write_text(content)
    assert call("verify", str(path))[0] == 2
    assert call("verify", str(tmp_path / "missing.json"))[0] == 2


def test_mul(tmp_path):
    path = tmp_path / "d.json"
    call("build", "--q", "4", "--n", "2", "--k", "3", "--out", str(path))
    dec, _ = fileformat.load(path)
    code, text = call("mul", str(path), "--inputs", "1", "1", "1")
    assert code == 0
    assert "product    1,0" in text and f"mu-cost    {dec.rank}" in text
    code, text = call("mul", str(path), "--inputs", "2,3", "1,1", "3", "--costing", "nu")
    assert code == 0 and "matches direct product" in text
    assert call("mul", str(path), "--inputs", "1", "1")[0] == 2
    assert call("mul", str(path), "--inputs", "9", "1", "1")[0] == 2


def test_round_trip_bit_exact(tmp_path):
    dec, prov = fileformat.load(GOLDEN / "build_q5_n2_k2.json")
    assert fileformat.dumps(dec, prov).encode() == (GOLDEN / "build_q5_n2_k2.json").read_bytes()
    F9 = field(9)
    dec9 = tensor.naive_decomposition(F9, (3, 1, 1), 2)
    back, _ = fileformat.loads(fileformat.dumps(dec9))
    assert back == dec9


@pytest.mark.parametrize(
    "argv,needle",
    [
        (("--q", "2", "--k", "2", "--n", "100"), "linear coefficient k(k q^(r/2) + 1) = 18"),
        (("--q", "2", "--k", "3", "--n", "100"), "r=6"),
        (("--q", "4", "--k", "2", "--n", "10"), "r=2"),
    ],
)
def test_bounds(argv, needle):
    code, text = call("bounds", *argv)
    assert code == 0 and needle in text


def test_bounds_json_and_table(tmp_path):
    code, text = call("bounds", "--q", "2", "--k", "2", "--n", "100", "--json")
    d = json.loads(text)
    assert d["r"] == 4 and d["linear_coefficient"] == 18 and d["tower_bound"]["mu"] == "16191/4"
    t = tmp_path / "t.json"
    t.write_text(json.dumps({"s": [1, 3, 6, 10], "b": [1, 3, 6, 10]}))
    code, text = call("bounds", "--q", "2", "--k", "2", "--n", "50", "--table-file", str(t))
    assert code == 0 and "UNVERIFIED" in text
    t.write_text(json.dumps({"s": [1, 3], "b": [1, 3]}))
    assert call("bounds", "--q", "2", "--k", "2", "--n", "50", "--table-file", str(t))[0] == 2


def test_bench_golden_and_parallel():
    code, text = call("bench", "--grid", "q=2;n=1-4;k=2,3")
    assert code == 0
    assert text == (GOLDEN / "bench_q2.csv").read_text()
    code2, text2 = call("bench", "--grid", "q=2;n=1-4;k=2,3", "--jobs", "2")
    assert text2 == text


def test_bench_single_cell_matches_build():
    _, csv_text = call("bench", "--grid", "q=3;n=5;k=2")
    row = csv_text.splitlines()[1].split(",")
    _, build_text = call("build", "--q", "3", "--n", "5", "--k", "2")
    assert f"rank       {row[3]}" in build_text


def test_bench_bad_grid():
    assert call("bench", "--grid", "q=6;n=1;k=2")[0] == 2
    assert call("bench", "--grid", "q=2;n=1")[0] == 2


def test_bench_cell_failure_is_reported():
    row, _ = cli.bench_cell(2, 3, 2, 0, mode="bogus")
    assert row["status"].startswith("error")


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "kmul", "bounds", "--q", "4", "--k", "2", "--n", "10"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and "r=2" in r.stdout
