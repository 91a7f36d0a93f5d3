import json
from fractions import Fraction

import pytest

from fibthue.cli import main
from fibthue.pipeline import Config, expected_solutions, run_all, verify_certificate


@pytest.fixture(scope="module")
def partial():
    return run_all(Config(max_n=14))


def test_partial_certificate(partial):
    assert partial.partial
    assert sorted(partial.solved) == list(range(1, 15))
    assert partial.exceptions() == [1, 3]
    prov = {n: p for n, (p, _, _) in partial.solved.items()}
    assert all(prov[n] == "oracle-verified" for n in range(1, 10))
    assert all(prov[n] == "reduction-certified" for n in range(10, 15))
    assert partial.coverage() == [(1, 14, "solved")]


def test_partial_certificate_verifies_and_is_deterministic(partial):
    text = partial.dumps()
    assert verify_certificate(json.loads(text)) == []
    assert run_all(Config(max_n=14, jobs=2)).dumps() == text
    doc = json.loads(text)
    assert doc["schema_version"] == 1
    assert doc["config"]["lll_delta"] == "3/4"
    assert "jobs" not in doc["config"]


def test_tampered_solution_is_caught(partial):
    doc = json.loads(partial.dumps())
    doc["solved"]["5"]["solutions"][0][0] = "17"
    assert any("n=5" in e for e in verify_certificate(doc))


def test_tampered_lattice_minimum_is_caught(partial):
    doc = json.loads(partial.dumps())
    step = doc["exponent_boxes"]["12"]["cases"][0]["b_steps"][0]
    step["c4_sq"] = str(int(step["c4_sq"]) + 1)
    assert any("lattice minimum" in e for e in verify_certificate(doc))


def test_missing_n_is_caught(partial):
    doc = json.loads(partial.dumps())
    del doc["solved"]["7"]
    assert any("contiguous" in e for e in verify_certificate(doc))


def test_expected_solutions():
    assert expected_solutions(5) == {(1, 0), (0, 1), (5, 1), (11, 1), (-1, 0), (0, -1), (-5, -1), (-11, -1)}


@pytest.mark.parametrize(
    "kw", [dict(precision_bits=32), dict(lll_delta=Fraction(1, 5)), dict(jobs=0), dict(max_n=0)]
)
def test_bad_config(kw):
    with pytest.raises(ValueError):
        Config(**kw)


def test_cli_solve(capsys, tmp_path):
    out = tmp_path / "s.json"
    assert main(["solve", "--n", "3", "--out", str(out)]) == 0
    assert "(38, 273)" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert ["38", "273", "-1"] in doc["solutions"]


def test_cli_prove_partial_and_verify(tmp_path, capsys):
    cert = tmp_path / "c.json"
    assert main(["prove", "--max-n", "6", "--out", str(cert)]) == 0
    assert main(["verify-cert", str(cert)]) == 0
    doc = json.loads(cert.read_text())
    doc["solved"]["2"]["solutions"].pop()
    cert.write_text(json.dumps(doc))
    assert main(["verify-cert", str(cert)]) == 1


def test_cli_reduce(capsys):
    assert main(["reduce", "--phase", "3", "--n-min", "128", "--n-max", "132"]) == 0
    assert "threshold on [128, 132]: 127" in capsys.readouterr().out
    assert main(["reduce", "--phase", "1", "--n-max", "1144000000000000"]) == 0
    assert "787" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["solve"],
        ["solve", "--n", "0"],
        ["reduce", "--phase", "4"],
        ["reduce", "--phase", "2", "--n-min", "5", "--n-max", "8"],
        ["prove", "--lll-delta", "1/8"],
        ["verify-cert", "/nonexistent/file.json"],
        ["bogus"],
    ],
)
def test_cli_bad_input(argv, capsys):
    assert main(argv) == 2


def test_cli_malformed_certificate(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["verify-cert", str(p)]) == 2
    p.write_text(json.dumps({"schema_version": 1}))
    assert main(["verify-cert", str(p)]) == 2
