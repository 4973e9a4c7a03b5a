"""The twelve primary acceptance criteria, one line of output each."""

from __future__ import annotations

import pytest

from ech_s1s2.checks import ALL_CHECKS


@pytest.mark.parametrize("check", ALL_CHECKS, ids=lambda f: f.__name__.removeprefix("check_"))
def test_primary_criterion(check, capsys):
    result = check()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.values
    assert result.within_budget, f"{result.elapsed:.1f}s exceeds {result.budget}s"
