"""Acceptance criteria 1-9 at full sample size.

Each test prints one PASS/FAIL line (visible in ``pytest -v`` output) and
asserts the outcome.
"""
import pytest

from omegafn import checks


@pytest.fixture
def report(capsys):
    def emit(result):
        with capsys.disabled():
            print("\n" + result.line())
            for note in result.notes:
                print("    " + note)
        return result

    return emit


@pytest.mark.parametrize("check", checks.CHECKS, ids=lambda c: c.__name__.replace("check_", ""))
def test_criterion(check, report):
    result = report(check(1.0))
    assert result.passed, result.line()
