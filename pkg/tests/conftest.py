import pytest

from botnet_econ import LearningCurve, RentMatrix, Scenario, TrafficProfile


def make_scenario(n=2, horizon=10.0, C=2800.0, C_min=10.0, usagefee=10.0, usagefee_max=5.0,
                  p_win=0.01, traffic=None, rents=None, curves=None, **kw):
    traffic = traffic if traffic is not None else TrafficProfile.constant(100.0, horizon)
    rents = rents if rents is not None else RentMatrix.uniform(n, 0.0)
    if not isinstance(rents, RentMatrix):
        rents = RentMatrix(tuple(tuple(r) for r in rents))
    curves = curves if curves is not None else (LearningCurve.exponential(1.0),) * n
    return Scenario(n, horizon, C, C_min, usagefee, usagefee_max, p_win, traffic, rents, tuple(curves), **kw)


@pytest.fixture
def scenario_factory():
    return make_scenario


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
