"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline.
"""

import pytest

from liouville_lab import suite
from liouville_lab.cli import main


def report(result):
    print(f"\n{result.line()}")
    return result


@pytest.fixture(scope="module")
def seed():
    return 0


def test_criterion_1_operator_checks(seed):
    res = report(suite.criterion_operators(seed))
    failing = [r for r in res.detail["rows"] if not r["pass"]]
    assert res.passed, failing


def test_criterion_2_mismatch_detection(seed):
    res = report(suite.criterion_mismatch(seed))
    assert res.passed, res.detail


def test_criterion_3_example1_end_to_end(seed):
    res = report(suite.criterion_example1(seed))
    assert res.passed, res.detail


def test_criterion_4_growth_classification(seed):
    res = report(suite.criterion_growth(seed))
    assert res.passed, [r for r in res.detail["rows"] if not r["pass"]]


def test_criterion_5_remark_reductions(seed):
    res = report(suite.criterion_remarks(seed))
    assert res.passed, res.detail


def test_criterion_6_regime_table(seed):
    res = report(suite.criterion_regimes(seed))
    assert res.passed, [r for r in res.detail["rows"] if not r["pass"]]


def test_criterion_7_constant_gap_nonexistence(seed):
    res = report(suite.criterion_nonexistence(seed))
    assert res.passed, res.detail


def test_criterion_8_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["--paper-suite", "--out", str(a), "--seed", "0"])
    main(["--paper-suite", "--out", str(b), "--seed", "0"])
    same = all((a / f).read_bytes() == (b / f).read_bytes()
               for f in ("paper_suite.json", "paper_suite.csv"))
    print(f"\ncriterion 8 [{'PASS' if same else 'FAIL'}] --paper-suite report bundles byte-identical")
    assert same
