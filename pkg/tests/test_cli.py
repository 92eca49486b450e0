import json
import subprocess
import sys

import pytest

from iprkit.cli import main
from iprkit.cnf import CNF, solve_cnf
from iprkit.core import parse_matrix


@pytest.fixture
def schur_file(tmp_path):
    path = tmp_path / "schur.txt"
    path.write_text("# x, y, x+y\n3 2\n1 0\n0 1\n1 1\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_seq(capsys):
    assert run(capsys, "seq", "compress", "0", "1", "1", "0", "2", "2", "3")[:2] == (0, "1 2 3\n")
    assert run(capsys, "seq", "delete-zeros", "0", "1", "0", "1")[1] == "1 1\n"
    assert run(capsys, "seq", "is-compressed", "1", "1")[:2] == (1, "false\n")
    assert run(capsys, "seq", "compress", "--", "-1")[0] == 2


def test_gen_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "wmt-matrix", "--a", "1,2", "--width", "3")
    assert code == 0
    A = parse_matrix(out)
    assert A.to_lists() == [[1, 2, 0], [1, 0, 2], [0, 1, 2]]
    code, out, _ = run(capsys, "gen", "mt-matrix", "--a", "1,2", "--width", "4", "--row-cap", "3")
    assert out.startswith("# truncated: first 3 of")
    assert parse_matrix(out).u == 3
    assert run(capsys, "gen", "mt-matrix", "--a", "1,1", "--width", "3")[0] == 2


def test_verify_exit_codes(capsys, schur_file):
    code, out, _ = run(capsys, "verify", "--matrix", schur_file, "--N", "5", "--r", "2")
    assert code == 0 and out.startswith("Forced")
    code, out, _ = run(capsys, "verify", "--matrix", schur_file, "--N", "4", "--r", "2")
    assert code == 1 and out.startswith("Avoidable")
    assert "0 1 1 0" in out
    code, out, _ = run(capsys, "verify", "--matrix", schur_file, "--N", "1", "--r", "2", "--deepen", "--max-N", "8")
    assert code == 0 and "N=5" in out


def test_verify_json_is_deterministic(capsys, schur_file):
    reports = []
    for threads in ("1", "2"):
        code, out, _ = run(capsys, "verify", "--matrix", schur_file, "--N", "13", "--r", "3", "--json", "--threads", threads)
        assert code == 1
        rep = json.loads(out)
        rep.pop("timing")
        rep.pop("determinism")
        reports.append(json.dumps(rep, sort_keys=True))
    assert reports[0] == reports[1]
    rep = json.loads(reports[0])
    assert rep["schema"] == 1 and rep["command"] == "verify"
    assert rep["result"]["verdict"] == "avoidable"
    code, out, _ = run(capsys, "verify", "--matrix", schur_file, "--N", "4", "--r", "2", "--json", "--threads", "1")
    assert json.loads(out)["determinism"] == {"deterministic": True, "threads": 1}


def test_verify_small_xmax_warns(capsys, schur_file):
    code, _, err = run(capsys, "verify", "--matrix", schur_file, "--N", "9", "--r", "2", "--xmax", "2")
    assert "warning" in err


def test_check_commands(capsys, schur_file, tmp_path):
    code, out, _ = run(capsys, "check", "columns-condition", schur_file)
    assert code == 1 and json.loads(out)["result"]["satisfied"] is False
    code, out, _ = run(capsys, "check", "first-entries", schur_file)
    assert code == 0 and json.loads(out)["result"]["first_entries"] == {"0": "1", "1": "1"}
    cc = tmp_path / "cc.txt"
    cc.write_text("1 3\n1 1 -2\n")
    code, out, _ = run(capsys, "check", "columns-condition", str(cc))
    assert code == 0
    assert json.loads(out)["result"]["certificate"]["partition"] == [[0, 1, 2]]


def test_check_subtracted(capsys, tmp_path):
    path = tmp_path / "sub.txt"
    # finite part: the identity on 1 column, remainder rows from the weak family a=(1,2)
    path.write_text("3 4\n1 1 2 0\n1 1 0 2\n1 0 1 2\n")
    code, out, _ = run(capsys, "check", "subtracted", "--matrix", str(path), "--n", "0", "--k", "1",
                       "--evidence", "wmt", "--a", "1,2")
    assert code == 0, out
    assert json.loads(out)["result"]["mode"]
    code, _, err = run(capsys, "check", "subtracted", "--matrix", str(path), "--n", "0", "--k", "1",
                       "--evidence", "wmt")
    assert code == 2 and "--a" in err


def test_sets(capsys):
    assert run(capsys, "sets", "pmt", "--a", "1,2", "--x", "2,3,5")[1].split() == ["8", "12", "13", "16", "32"]
    assert run(capsys, "sets", "fs", "--x", "1,2")[1].split() == ["1", "2", "3"]
    code, out, _ = run(capsys, "sets", "subsystem", "--kind", "sum", "--x", "1,2,4,8", "--blocks", "1,2;3,4")
    assert code == 0 and out.split() == ["3", "12"]
    assert run(capsys, "sets", "subsystem", "--kind", "sum", "--x", "1,2", "--blocks", "1;3")[0] == 2


def test_witness(capsys, schur_file, tmp_path):
    col = tmp_path / "col.txt"
    col.write_text("5 2\n0 1 1 0 0\n")
    code, out, _ = run(capsys, "witness", "--matrix", schur_file, "--coloring", str(col), "--json")
    rep = json.loads(out)["result"]
    assert code == 0 and rep["found"]
    x, y = rep["x"]
    c = [0, 1, 1, 0, 0]
    assert c[x - 1] == c[y - 1] == c[x + y - 1] == rep["color"]
    col.write_text("4 2\n0 1 1 0\n")
    assert run(capsys, "witness", "--matrix", schur_file, "--coloring", str(col))[0] == 1


def test_diagsum_and_export(capsys, schur_file, tmp_path):
    code, out, _ = run(capsys, "diagsum", schur_file, schur_file)
    assert code == 0 and parse_matrix(out).shape == (6, 4)
    cnf_path = tmp_path / "s.cnf"
    assert run(capsys, "export-cnf", "--matrix", schur_file, "--N", "5", "--r", "2", "-o", str(cnf_path))[0] == 0
    assert solve_cnf(CNF.from_dimacs(cnf_path.read_text())) is None


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n1 1/0\n")
    code, _, err = run(capsys, "check", "first-entries", str(bad))
    assert code == 2 and "denominator" in err
    assert run(capsys, "verify", "--matrix", str(tmp_path / "missing"), "--N", "3", "--r", "2")[0] == 2
    assert run(capsys, "verify", "--N", "3")[0] == 2


def test_module_entry_point(schur_file):
    proc = subprocess.run([sys.executable, "-m", "iprkit", "verify", "--matrix", schur_file, "--N", "5", "--r", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("Forced")
