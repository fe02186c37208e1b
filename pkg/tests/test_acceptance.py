"""Acceptance battery: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -s`` to see the lines.  Time limits and
the zero-failure requirement are pinned here, apart from the suite itself.
"""
import pytest

from forcelab.suite import CRITERIA

# criterion -> wall-clock limit in seconds
LIMITS = {1: 30, 2: 60, 3: 10, 4: 60, 5: 60, 6: 60, 7: 30, 8: 120, 9: 30, 10: 60}

# minimum case counts, so a criterion cannot pass by checking nothing
MIN_CASES = {1: 100, 2: 100, 3: 1000, 4: 100, 5: 50, 6: 60, 7: 100, 8: 100, 9: 10, 10: 10}


def test_limits_cover_every_criterion():
    assert sorted(c.number for c in CRITERIA) == sorted(LIMITS)


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"criterion_{c.number}")
def test_criterion(criterion):
    res = criterion(seed=0)
    print()
    print(res.line())
    assert res.limit == LIMITS[res.number]
    assert res.cases >= MIN_CASES[res.number]
    assert res.failures == [], res.failures[:5]
    assert res.seconds < LIMITS[res.number]
