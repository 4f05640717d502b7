import pytest

from sea2dof.sea_model import SeaParams, plant_tf
from sea2dof.synthesis import design_2dof

# criterion number -> (passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def plant():
    return plant_tf(SeaParams())


@pytest.fixture(scope="session")
def rounded_gain_plant():
    return plant_tf(SeaParams(use_paper_gain=True))


@pytest.fixture(scope="session")
def baseline_design(plant):
    return design_2dof(plant, 3.0, 10.0, 2.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")
