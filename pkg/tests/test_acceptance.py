"""Runs every acceptance criterion at its stated tolerance.

One PASS/FAIL line per criterion is printed (and repeated in the terminal
summary) together with the individual checks it is made of.
"""

import time

import pytest

from zclass.verify import CRITERIA


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key, acceptance_log):
    t0 = time.perf_counter()
    checks = CRITERIA[key]()
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in checks)
    line = f"{key:<4} {'PASS' if ok else 'FAIL'}  ({len(checks)} checks, {elapsed:.2f} s)"
    print(line)
    acceptance_log.append(line)
    for c in checks:
        sub = f"       {'ok  ' if c.passed else 'FAIL'} {c.name}: measured {c.measured:.3e}, tolerance {c.tolerance:.3e} {c.details}".rstrip()
        print(sub)
        acceptance_log.append(sub)
    failed = [c.name for c in checks if not c.passed]
    assert not failed, f"{key} failed: {failed}"


def test_suite_runtime_budget():
    # the whole suite must fit comfortably in three minutes
    t0 = time.perf_counter()
    for f in CRITERIA.values():
        f()
    assert time.perf_counter() - t0 < 180
