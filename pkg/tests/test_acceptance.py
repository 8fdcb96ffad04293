"""Acceptance criteria A1-A10.

Each test prints one PASS/FAIL line; the lines are also repeated in the pytest
terminal summary. Run standalone with ``python tests/test_acceptance.py``.
"""

import pytest

from pilab import acceptance

RESULTS = []

CHECKS = [
    ("A1", acceptance.a1_fixtures),
    ("A2", acceptance.a2_recursion_and_lax),
    ("A3", acceptance.a3_pi2_crosscheck),
    ("A4", acceptance.a4_positivity),
    ("A5", acceptance.a5_m2_solution),
    ("A6", acceptance.a6_m4_solution),
    ("A7", acceptance.a7_flows),
    ("A8", acceptance.a8_catastrophe),
    ("A9", acceptance.a9_double_scaling_m2),
    ("A10", acceptance.a10_double_scaling_m4),
]


@pytest.mark.parametrize("name, check", CHECKS, ids=[n for n, _ in CHECKS])
def test_criterion(name, check):
    crit = check()
    RESULTS.append(crit.line())
    print(crit.line())
    assert crit.passed, crit.summary


if __name__ == "__main__":
    for _, check in CHECKS:
        print(check().line(), flush=True)
