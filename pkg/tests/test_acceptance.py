"""Acceptance criteria, one test each, with a one-line verdict printed per criterion."""

import subprocess
import sys

import pytest

from ahgraph import acceptance


def _report(res, capsys):
    values = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                       for k, v in res.values[-3:])
    with capsys.disabled():
        print(f"\n{acceptance.summary_line(res)} :: {values}")


@pytest.mark.parametrize("number", range(1, 9))
def test_criterion(number, capsys):
    res = acceptance.evaluate(number)
    _report(res, capsys)
    assert res.passed, res.values


def test_criterion_9_determinism(capsys):
    runs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "ahgraph", "verify", "--suite", "all"],
                              capture_output=True, text=True, timeout=600)
        verdicts = [line.split("]")[0] for line in proc.stderr.splitlines()
                    if line.startswith("[")]
        runs.append((proc.stdout, verdicts, proc.returncode))
    same_bytes = runs[0][0] == runs[1][0] and runs[0][0] != ""
    same_vector = runs[0][1] == runs[1][1] and len(runs[0][1]) == 9
    status = "PASS" if same_bytes and same_vector else "FAIL"
    with capsys.disabled():
        print(f"\n[{status}] criterion 9: determinism :: same_bytes={same_bytes}, "
              f"same_pass_vector={same_vector}")
    assert same_bytes and same_vector
