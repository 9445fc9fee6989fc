"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
collected into a summary section at the end of the pytest run.  Run this
file directly (``python3 tests/test_acceptance.py``) for the lines alone.
"""

from __future__ import annotations

import pytest

from regfrac.acceptance import CRITERIA, run_criterion

RESULTS: dict[int, str] = {}


@pytest.mark.parametrize("cid", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(cid):
    r = run_criterion(cid)
    RESULTS[cid] = r.line()
    print(r.line())
    assert r.passed, r.detail


if __name__ == "__main__":
    import sys

    ok = True
    for cid, *_ in CRITERIA:
        r = run_criterion(cid)
        print(r.line(), flush=True)
        ok &= r.passed
    sys.exit(0 if ok else 1)
