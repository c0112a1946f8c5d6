"""Acceptance suite: one test per numbered criterion, at its stated tolerance.

Run directly (``python tests/test_acceptance.py``) for a pass/fail line per
criterion; under pytest the same lines are collected into the terminal summary.
"""

import sys

import pytest

from symspace.acceptance import CHECKS, HeatSettings, run_check

RESULTS = {}


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CHECKS), ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    res = run_check(number, HeatSettings())
    RESULTS[number] = res
    print(res.line())
    assert res.passed, res.details


def main():
    ok = True
    for number in sorted(CHECKS):
        res = run_check(number, HeatSettings())
        print(res.line(), flush=True)
        ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
