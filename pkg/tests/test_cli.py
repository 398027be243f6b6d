"""Command-line interface: golden outputs, JSON shapes, exit codes."""

import json

import pytest

from cesaro.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_golden(capsys):
    code, out, _ = run(capsys, "eval", "residue 2 {0}", "--N", "10")
    assert code == 0
    assert out == "1/2 = 0.5\n"
    code, out, _ = run(capsys, "eval", "residue 3 {0,1}", "--N", "15")
    assert code == 0
    assert out == "2/3 = 0.666666666667\n"


def test_limits_exact_json(capsys):
    code, out, _ = run(capsys, "limits", "blocks geometric 2")
    assert code == 0
    doc = json.loads(out)
    assert doc["upper"] == {"rational": "2/3", "value": pytest.approx(2 / 3)}
    assert doc["verdict"] == "NotInF"
    assert doc["method"] == "block-formula"


def test_limits_streamed_json(capsys):
    code, out, _ = run(
        capsys,
        "limits",
        "inter(blocks geometric 2, residue 2 {0})",
        "--horizon",
        "65536",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["method"] == "streamed" and doc["horizon"] == 65536
    assert doc["verdict"] == "NotInF"


def test_parse_error_exit_code(capsys):
    code, out, err = run(capsys, "eval", "frobnicate", "--N", "5")
    assert code == 2
    assert "parse error" in err and "position" in err


def test_trace_csv(capsys):
    code, out, _ = run(capsys, "trace", "all", "--horizon", "16")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "N,nu_N"
    assert lines[1] == "1,1"
    assert lines[-1] == "16,1"
    ns = [int(row.split(",")[0]) for row in lines[1:]]
    assert ns == sorted(set(ns))


def test_nullmod_json_and_audit(capsys, tmp_path):
    audit = tmp_path / "audit.csv"
    code, out, _ = run(
        capsys,
        "nullmod",
        "residue 2 {1}",
        "--horizon",
        "1000",
        "--audit",
        str(audit),
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["bound"] == "1/2"
    assert doc["removed"] == [1]
    assert doc["kept_count"] == 499
    assert not doc["approximate"]
    rows = audit.read_text().strip().splitlines()
    assert rows[0] == "N,member,kept_or_removed,running_nu"
    assert len(rows) == 1001


def test_nullmod_bad_bound_exit_code(capsys):
    code, _, err = run(capsys, "nullmod", "residue 2 {1}", "--bound", "1/3")
    assert code == 4
    assert "nullmod error" in err


def test_chain_verify_and_certify(capsys, tmp_path):
    chainfile = tmp_path / "chain.txt"
    chainfile.write_text(
        "# a nested residue chain\n"
        "residue 2 {0}\n"
        "residue 8 {0}\n"
        "residue 4 {0}\n"
    )
    code, out, _ = run(capsys, "chain", "verify", str(chainfile), "--horizon", "1000")
    assert code == 0
    doc = json.loads(out)
    assert doc["elements"] == ["residue 8 {0}", "residue 4 {0}", "residue 2 {0}"]

    code, out, _ = run(
        capsys,
        "chain",
        "certify",
        str(chainfile),
        "--epsilon",
        "1/100",
        "--horizon",
        "100000",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["epsilon"] == 0.01
    assert doc["N_epsilon"] <= 200


def test_chain_certify_failure_exit_code(capsys, tmp_path):
    chainfile = tmp_path / "chain.txt"
    chainfile.write_text("explicit{%s}\n" % ",".join(str(i) for i in range(1, 400)))
    code, out, _ = run(
        capsys, "chain", "certify", str(chainfile), "--epsilon", "1/10",
        "--horizon", "400",
    )
    assert code == 5
    assert "failure" in json.loads(out)


def test_chain_incomparable_exit_code(capsys, tmp_path):
    chainfile = tmp_path / "chain.txt"
    chainfile.write_text("residue 2 {0}\nresidue 3 {0}\n")
    code, _, err = run(capsys, "chain", "verify", str(chainfile))
    assert code == 5
    assert "chain error" in err


def test_quotient_closure(capsys, tmp_path):
    seedfile = tmp_path / "seed.json"
    seedfile.write_text(
        json.dumps({"universe": 3, "members": [[], [1, 2], [3], [1, 2, 3]]})
    )
    code, out, _ = run(capsys, "quotient", "closure", "--seed", str(seedfile))
    assert code == 0
    doc = json.loads(out)
    assert doc["closure"] == [[], [1, 2], [1, 2, 3], [3]]


def test_quotient_build(capsys, tmp_path):
    idealfile = tmp_path / "ideal.json"
    idealfile.write_text(json.dumps({"universe": 3, "members": [[], [1]]}))
    code, out, _ = run(capsys, "quotient", "build", "--ideal", str(idealfile))
    assert code == 0
    doc = json.loads(out)
    assert doc["carrier_size"] == 4


def test_quotient_nulleq(capsys):
    code, out, _ = run(
        capsys,
        "quotient",
        "nulleq",
        "residue 2 {0}",
        "union(residue 2 {0}, predicate pow2)",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "Equivalent" and doc["exact"]


def test_repro_prints_pass_lines(capsys):
    code, out, _ = run(capsys, "repro")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 13
    assert all(line.startswith("PASS ") for line in lines)


def test_default_horizon_env(capsys, monkeypatch):
    monkeypatch.setenv("CESARO_DEFAULT_HORIZON", "4096")
    code, out, _ = run(capsys, "limits", "inter(blocks geometric 2, residue 2 {0})")
    assert code == 0
    assert json.loads(out)["horizon"] == 4096
