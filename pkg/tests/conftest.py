import os
from collections import OrderedDict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion -> list of (check, passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE = OrderedDict()


@pytest.fixture
def acceptance_log():
    def record(criterion, check, passed, detail=""):
        ACCEPTANCE.setdefault(criterion, []).append((check, bool(passed), detail))
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] criterion {criterion} / {check}: {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        checks = ACCEPTANCE[criterion]
        ok = all(p for _, p, _ in checks)
        failing = "; ".join(f"{c}: {d}" for c, p, d in checks if not p)
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}"
        tr.write_line(line + (f"  ({failing})" if failing else ""))
