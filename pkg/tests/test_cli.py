import io
import subprocess
import sys

import pytest

from conftest import BAD
from ucs_entropy.cli import build_parser, main

Q4 = "0,1,2,3,4"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_ife_example():
    code, out, _ = run("ife", "-s", "ex4.sys", "--target", Q4, "--inputs", "a,b,c")
    assert code == 0
    assert out.splitlines()[0] == "h_fb exact=(1/4)*log2(2)\tdecimal=0.250000000000"


def test_hinv_exact_example():
    code, out, _ = run("hinv-exact", "-s", "ex4.sys", "--target", Q4, "--inputs", "a,b,c")
    assert code == 0 and out == "h_inv exact=0 (rho=1 structural)\n"


def test_rinv_example():
    assert run("rinv", "-s", "ex2.sys", "--target", "0,2", "-n", "3") == (0, "r_inv=8\n", "")


def test_exit_code_domain():
    code, out, err = run("conditions", "-s", "ex2.sys", "--target", "0,2", "--inputs", "a")
    assert code == 1 and "C.3\tfail" in out
    code, _, err = run("hinv-exact", "-s", "ex2.sys", "--target", "0,2", "--inputs", "a")
    assert code == 1 and "ConditionsNotMet" in err
    code, _, err = run("rinv", "-s", "ex4.sys", "--target", "0,1", "-n", "2")
    assert code == 1 and "NotControlledInvariant" in err


def test_exit_code_parse():
    code, out, err = run("validate", "-s", str(BAD / "dup_trans.sys"))
    assert code == 2 and out == "" and "E_DUP_TRANS" in err
    code, _, err = run("validate", "-s", "no/such/file.sys")
    assert code == 2


def test_exit_code_budget():
    code, _, err = run("rinv", "-s", "ex2.sys", "--target", "0,2", "-n", "6", "--budget", "3")
    assert code == 3 and "SearchBudgetExceeded" in err


def test_bad_flags():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["rinv", "-s", "ex2.sys", "--target", "0", "-n", "0"])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["ife", "-s", "ex4.sys", "--target", Q4, "--tol", "0"])


COMMANDS = [
    ["validate", "-s", "ex4.sys", "-c", "ex4_a3.cov", "--target", Q4],
    ["rinv", "-s", "ex4.sys", "--target", Q4, "-n", "3", "--certificate"],
    ["entropy-report", "-s", "ex2.sys", "--target", "0,2", "--n-max", "3", "--format", "tsv"],
    ["cover-check", "-s", "ex3.sys", "-c", "ex3_a1.cov"],
    ["cover-rinv", "-s", "ex4.sys", "-c", "ex4_a1.cov", "-n", "3"],
    ["cover-entropy", "-s", "ex4.sys", "-c", "ex4_a3.cov", "--m-max", "4", "--format", "tsv"],
    ["matrices", "-s", "ex4.sys", "-c", "ex4_a2.cov"],
    ["matrices", "-s", "ex4.sys", "--target", Q4],
    ["conditions", "-s", "ex4.sys", "--target", Q4],
    ["refine-search", "-s", "ex4.sys", "--target", Q4, "--max-cells", "3"],
    ["oracle", "-s", "ex4.sys", "--target", Q4, "-n", "2", "-c", "ex4_a1.cov"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_commands_succeed_and_repeat(argv):
    first = run(*argv)
    assert first[0] == 0, first
    assert first[1]
    assert run(*argv) == first


def test_console_script_is_byte_identical():
    cmd = [sys.executable, "-m", "ucs_entropy.cli", "cover-entropy", "-s", "ex4.sys", "-c", "ex4_a2.cov", "--m-max", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and b"exact=(1/4)*log2(2)" in a
