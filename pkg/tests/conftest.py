from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, label, passed, detail in sorted(RESULTS, key=lambda r: (r[0], r[1])):
        terminalreporter.write_line(f"criterion {criterion:>2} [{label}]: {'PASS' if passed else 'FAIL'} {detail}")
