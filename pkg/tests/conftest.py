import pytest

from vsi_ssa.params import REFERENCE
from vsi_ssa.sim_avg import AvgInputs, simulate_average
from vsi_ssa.sim_switched import simulate_switched
from vsi_ssa.steady_state import operating_point


@pytest.fixture(scope="session")
def params():
    return REFERENCE


@pytest.fixture(scope="session")
def lossless(params):
    return params.replace(r_l=0.0, r_on=0.0, r_s=0.0)


@pytest.fixture(scope="session")
def op(params):
    return operating_point(params)


@pytest.fixture(scope="session")
def avg_trace(params, op):
    return simulate_average(params, AvgInputs.from_operating_point(params, op), duration=25e-3, dt=1e-6)


@pytest.fixture(scope="session")
def switched_trace(params, op):
    return simulate_switched(params, op, duration=100e-3, dt=0.5e-6)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
