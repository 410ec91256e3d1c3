import numpy as np
import pytest

from solvbem.bench import StudyConfig, run_convergence_study, run_line_potential_study, run_work_precision_study
from solvbem.cli import FIXTURE_LEVELS, _fixture
from solvbem.surface import ChargeSet

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = {}


def record(number, passed, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sphere_study():
    """Seed-42 work-precision study, R=6, h=1, Q=10, levels 1-4, LU."""
    return run_work_precision_study(StudyConfig(seed=42))


@pytest.fixture(scope="session")
def sphere_study_gmres():
    return run_convergence_study(StudyConfig(seed=42, solve="gmres", tol=1e-10))


@pytest.fixture(scope="session")
def born_study():
    return run_convergence_study(StudyConfig(charges=ChargeSet([[0.0, 0.0, 0.0]], [1.0])))


@pytest.fixture(scope="session")
def line_studies():
    return {z: run_line_potential_study(charge_z=z, level=3) for z in (4.5, 5.5)}


def residue_config(name):
    stems = FIXTURE_LEVELS[name]
    return StudyConfig(
        meshes=tuple((_fixture(s + ".vert"), _fixture(s + ".face")) for s in stems),
        pqr=_fixture(name.lower() + ".pqr"),
    )


@pytest.fixture(scope="session")
def residue_studies():
    return {name: run_work_precision_study(residue_config(name)) for name in ("ASP", "ARG")}
