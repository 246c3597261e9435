"""Acceptance criteria; run with ``pytest tests/test_acceptance.py -s`` to see one line per check."""
import pytest

from ncphase.acceptance import CRITERIA, jacobi_suite, oracle_equivalence


@pytest.mark.parametrize("label, fn", CRITERIA, ids=[label for label, _ in CRITERIA])
def test_criterion(label, fn):
    reports = fn(42) if fn in (jacobi_suite, oracle_equivalence) else fn()
    assert reports
    for r in reports:
        print(f"[{label}] {r.line()}")
    failed = [r.line() for r in reports if not r.passed]
    assert not failed, failed
