import pytest


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion, even without -s.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        outcome = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"[ACCEPTANCE] {outcome} {name}", flush=True)

from powerbench.agent.config import AgentConfig
from powerbench.agent.controller import AgentController


@pytest.fixture
def agent_config(tmp_path):
    return AgentConfig(workdir=tmp_path)


@pytest.fixture
def controller(agent_config):
    return AgentController(agent_config)
