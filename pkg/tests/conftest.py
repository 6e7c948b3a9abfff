import os

import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical studies")


@pytest.fixture
def serial(monkeypatch):
    monkeypatch.setenv("RIEMANNSUM_NUM_THREADS", "1")
    return os.environ["RIEMANNSUM_NUM_THREADS"]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
