"""Shared record of acceptance outcomes, printed by the conftest summary hook."""

RESULTS = []


def record(criterion, label, passed, detail=""):
    RESULTS.append((criterion, label, bool(passed), detail))
    line = f"criterion {criterion:>2} [{label}]: {'PASS' if passed else 'FAIL'} {detail}"
    print(line)
    return passed
