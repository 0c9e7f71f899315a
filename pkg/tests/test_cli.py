import json

import numpy as np
import pytest

from ciprng.chaotic import BooleanFunction, save_boolean_function
from ciprng.cli import main, worker_count
from ciprng.stream import make_generator, parse


def test_analyze_negation(tmp_path, capsysbinary):
    path = tmp_path / "neg4.txt"
    save_boolean_function(BooleanFunction.negation(4), path)
    assert main(["analyze", str(path)]) == 0
    report = json.loads(capsysbinary.readouterr().out)
    assert report["chaotic"] is True and report["doubly_stochastic"] is True
    assert report["scc_count"] == 1


def test_analyze_identity(tmp_path):
    path = tmp_path / "id.txt"
    out = tmp_path / "r.json"
    save_boolean_function(BooleanFunction.identity(3), path)
    assert main(["analyze", str(path), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["chaotic"] is False


def test_gen_count_zero(capsysbinary):
    assert main(["gen", "--generator", "ci-seq", "--seed", "1", "--count", "0"]) == 0
    assert capsysbinary.readouterr().out == b""


@pytest.mark.parametrize("fmt", ["raw-le32", "hex", "bits"])
def test_gen_matches_library(tmp_path, fmt):
    out = tmp_path / "w"
    assert main(["gen", "--generator", "xor128", "--seed", "0x10", "--count", "50",
                 "--format", fmt, "--out", str(out)]) == 0
    assert np.array_equal(parse(out.read_bytes(), fmt), make_generator("xor128", 16).words(50))


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for path in (a, b):
        main(["gen", "--generator", "improved", "--seed", "3", "--count", "100",
              "--threads", "16", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes() and len(a.read_bytes()) == 400


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--count", "3"])  # missing seed
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--seed", "-1"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_domain_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n0\n1\n")
    assert main(["analyze", str(bad)]) == 1
    assert main(["battery", "--seed", "1", "--count", "1000"]) == 1
    assert "error" in capsys.readouterr().err


def test_kernel_subcommands(tmp_path):
    comb = tmp_path / "comb.json"
    comb.write_text(json.dumps({"comb1": [1, 0], "comb2": [0, 1]}))
    outs = {}
    for kind in ("naive", "improved", "bbs"):
        out = tmp_path / kind
        args = ["kernel", kind, "--seed", "9", "--threads", "4", "--count", "3",
                "--calls", "2", "--comb-size", "2", "--out", str(out)]
        if kind == "improved":
            args += ["--comb-file", str(comb)]
        assert main(args) == 0
        outs[kind] = out.read_bytes()
        assert len(outs[kind]) == 4 * 4 * 3 * 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"comb1": [0, 3], "comb2": [0, 1]}))
    assert main(["kernel", "improved", "--seed", "1", "--threads", "4",
                 "--comb-file", str(bad)]) == 1


def test_kernel_output_independent_of_workers(tmp_path, monkeypatch):
    paths = []
    for workers in ("1", "8"):
        monkeypatch.setenv("CIPRNG_THREADS", workers)
        out = tmp_path / f"w{workers}"
        main(["kernel", "bbs", "--seed", "2", "--threads", "40", "--count", "5",
              "--workers", "8", "--out", str(out)])
        paths.append(out.read_bytes())
    assert paths[0] == paths[1]


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("CIPRNG_THREADS", "2")
    assert worker_count(8) == 2
    monkeypatch.delenv("CIPRNG_THREADS")
    assert worker_count(3) == 3


def test_battery_and_bench(tmp_path):
    out = tmp_path / "b.json"
    assert main(["battery", "--seed", "4", "--alpha", "0.001", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["bits"] == 1_000_000 and len(doc["tests"]) == 7
    assert main(["bench", "--generator", "xorshift32", "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["samples_per_second"] > 0


def test_bg_round_trip_fixture(tmp_path, capsysbinary):
    key = tmp_path / "key"
    key.write_text("p=7\nq=11\n")
    ct = tmp_path / "ct"
    assert main(["bg", "encrypt", "--key", str(key), "--message", "101100",
                 "--seed", "5", "--out", str(ct)]) == 0
    assert main(["bg", "decrypt", "--key", str(key), "--input", str(ct)]) == 0
    assert capsysbinary.readouterr().out == b"101100\n"


def test_bg_chaotic_keygen_round_trip(tmp_path, capsysbinary):
    sec, pub, ct = tmp_path / "sec", tmp_path / "pub", tmp_path / "ct"
    assert main(["bg", "keygen", "--seed", "8", "--bits", "10", "--chaotic",
                 "--out", str(sec), "--public-out", str(pub)]) == 0
    assert "N=" in pub.read_text() and "p=" in sec.read_text()
    msg = "1011" * 3  # 10-bit primes give 3-bit blocks
    assert main(["bg", "encrypt", "--key", str(pub), "--message", msg, "--seed", "1",
                 "--chaotic", "--out", str(ct)]) == 0
    assert main(["bg", "decrypt", "--key", str(sec), "--input", str(ct), "--chaotic"]) == 0
    assert capsysbinary.readouterr().out.decode().strip() == msg


def test_bg_errors(tmp_path):
    key = tmp_path / "key"
    key.write_text("N=77\nS0=1\n")
    assert main(["bg", "encrypt", "--key", str(key), "--message", "101",
                 "--seed", "1", "--chaotic"]) == 1  # 3 bits, 2-bit blocks
    assert main(["bg", "encrypt", "--key", str(key), "--message", "12", "--seed", "1"]) == 1
    ct = tmp_path / "ct"
    ct.write_text("L=1\nunit=1\nc=1\ny=4\n")
    assert main(["bg", "decrypt", "--key", str(key), "--input", str(ct)]) == 1
