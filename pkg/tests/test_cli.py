import subprocess
import sys

import pytest

from conftest import FIXTURES
from netkernel.cli import main

INST = str(FIXTURES / "example.inst")
SUPPORT = str(FIXTURES / "example.support")
CYCLIC = str(FIXTURES / "example.cyclic")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_worked_example(capsys):
    code, out, _ = run(capsys, "solve", INST, "--support", SUPPORT, "--cyclic", CYCLIC)
    assert code == 0
    assert "x 1:2:3 = 35 - 2*x2:5:3 - 8*x3:5:3" in out
    assert "x 2:3:4 = -19/2 + 3/2*x2:5:3 + 5/2*x3:5:3" in out
    assert "free 2:5:3 3:5:3" in out


def test_dumps(capsys):
    code, out, _ = run(capsys, "solve", INST, "--support", SUPPORT, "--cyclic", CYCLIC, "--dump-tables", "--dump-D")
    assert code == 0
    assert "A^1 = 66, A^2 = 36, A_24 = -4" in out
    assert "#   [  1/2     1  17/2 ]" in out
    assert "x~^1 over ((1,2)^1, (1,3)^1, (2,3)^1) = (-6, 10, 0)" in out
    code, out, _ = run(capsys, "solve", INST, "--dump-cycles")
    assert "cycle L(5,3)^3:" in out


def test_solve_verify_round_trip(capsys, tmp_path):
    sol = tmp_path / "example.sol"
    code, _, _ = run(capsys, "solve", INST, "--eval", "3:2:4=1", "3:5:3=1/2", "-o", str(sol))
    assert code == 0
    assert "eval 3:2:4=1 3:5:3=1/2" in sol.read_text()
    code, out, _ = run(capsys, "verify", INST, str(sol))
    assert code == 0
    assert out.strip().endswith("verify: PASS")


def test_verify_detects_tampering(capsys, tmp_path):
    sol = tmp_path / "example.sol"
    run(capsys, "solve", INST, "--support", SUPPORT, "--cyclic", CYCLIC, "-o", str(sol))
    sol.write_text(sol.read_text().replace("x 1:2:3 = 35", "x 1:2:3 = 36"))
    code, out, _ = run(capsys, "verify", INST, str(sol))
    assert code == 1
    assert "FAIL" in out and "side p=2" in out


def test_verify_numeric_flow(capsys, tmp_path):
    sol = tmp_path / "flow.txt"
    run(capsys, "solve", INST, "--support", SUPPORT, "--cyclic", CYCLIC, "--eval", "2:5:3=0", "3:5:3=0", "-o", str(sol))
    values = [line.replace("value", "x") for line in sol.read_text().splitlines() if line.startswith("value")]
    sol.write_text("\n".join(values) + "\n")
    assert run(capsys, "verify", INST, str(sol))[0] == 0
    sol.write_text(sol.read_text().replace("x 1:1:2 = 29", "x 1:1:2 = 28"))
    code, out, _ = run(capsys, "verify", INST, str(sol))
    assert code == 1
    assert "balance k=1 node=1" in out


def test_verify_eval_block_mismatch(capsys, tmp_path):
    sol = tmp_path / "example.sol"
    run(capsys, "solve", INST, "--eval", "3:2:4=0", "3:5:3=0", "-o", str(sol))
    text = sol.read_text()
    line = next(l for l in text.splitlines() if l.startswith("value"))
    sol.write_text(text.replace(line, line + "1"))
    assert run(capsys, "verify", INST, str(sol))[0] == 1


def test_float_mode(capsys, tmp_path):
    sol = tmp_path / "float.sol"
    assert run(capsys, "solve", INST, "--mode", "float", "-o", str(sol))[0] == 0
    assert run(capsys, "verify", INST, str(sol), "--mode", "float")[0] == 0


def test_malformed_instance_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.inst"
    bad.write_text("commodity 1\nnode 1\narc 1 2 3\n")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2
    assert "line 3" in err
    assert run(capsys, "solve", str(tmp_path / "missing.inst"))[0] == 2


def test_bad_eval_point_exit_2(capsys):
    assert run(capsys, "solve", INST, "--support", SUPPORT, "--cyclic", CYCLIC, "--eval", "1:2:3=1")[0] == 2


def test_inconsistent_balances_exit_3(capsys, tmp_path):
    bad = tmp_path / "bumped.inst"
    bad.write_text((FIXTURES / "example.inst").read_text().replace("node 1 balance 4", "node 1 balance 5"))
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 3
    assert "k=1 sum=1" in err


def test_rank_deficiency_exit_4(capsys):
    assert run(capsys, "solve", str(FIXTURES / "bridge_coupling.inst"))[0] == 4


def test_singular_pinned_exit_5(capsys):
    argv = ["solve", str(FIXTURES / "singular_lead.inst"), "--cyclic", str(FIXTURES / "singular_lead.cyclic")]
    assert run(capsys, *argv)[0] == 5
    assert run(capsys, *argv[:2])[0] == 0


def test_gen_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.inst", tmp_path / "b.inst"
    for out in (a, b):
        assert run(capsys, "gen", "--seed", "11", "--nodes", "7", "-o", str(out))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("# generated: commodities=3 nodes=7")


def test_gen_infeasible_exit_2(capsys):
    code, _, err = run(capsys, "gen", "--commodities", "1", "--coupled", "1")
    assert code == 2
    assert "infeasible" in err


def test_tree_minimum_needs_relaxed(capsys, tmp_path):
    inst = tmp_path / "tree.inst"
    run(capsys, "gen", "--extra-arcs", "0", "--side", "0", "--coupled", "0", "-o", str(inst))
    assert run(capsys, "solve", str(inst))[0] == 2
    code, out, _ = run(capsys, "solve", str(inst), "--relaxed")
    assert code == 0
    assert "\nfree\n" in out


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_gen_solve_verify_pipeline(capsys, tmp_path, seed):
    inst, sol = tmp_path / "g.inst", tmp_path / "g.sol"
    assert run(capsys, "gen", "--seed", str(seed), "-o", str(inst))[0] == 0
    code = run(capsys, "solve", str(inst), "-o", str(sol))[0]
    if code == 4:
        return
    assert code == 0
    code, out, _ = run(capsys, "verify", str(inst), str(sol), "--trials", "5")
    assert code == 0, out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "netkernel.cli", "solve", INST, "--support", SUPPORT, "--cyclic", CYCLIC],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "x 3:4:5 = -1 + 1*x3:5:3" in proc.stdout
