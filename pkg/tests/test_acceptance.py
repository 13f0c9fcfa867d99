"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from losr.acceptance import ALL_CHECKS

RESULTS = []


@pytest.mark.parametrize("check", ALL_CHECKS, ids=[f"criterion-{i + 1}" for i in range(len(ALL_CHECKS))])
def test_criterion(check):
    result = check()
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()
