"""Runs the eleven acceptance criteria at their stated sample counts and tolerances."""
import pytest

from cpstar import acceptance

RESULTS = []


@pytest.mark.parametrize("number", range(1, len(acceptance.CRITERIA) + 1))
def test_criterion(number, capsys):
    result = acceptance.CRITERIA[number - 1]("full", 0)
    RESULTS.append(result)
    with capsys.disabled():
        print(f"\n{result.line()}  {result.details}")
    assert result.passed, result.details
