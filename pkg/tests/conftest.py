import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number, passed, detail=""):
    ACCEPTANCE[number] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def bundled_runs(tmp_path_factory):
    """Each bundled scenario run twice into separate directories."""
    from diskapprox.runner import run_scenario
    from diskapprox.scenario import bundled

    out = {}
    for name in ("split_cantor", "irreducible_w1"):
        sc = bundled(name)
        runs = []
        for k in range(2):
            d = tmp_path_factory.mktemp(f"{name}_{k}")
            runs.append((run_scenario(sc, d), d))
        out[name] = runs
    return out
