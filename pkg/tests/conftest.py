import os

import pytest

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--skip-stretch", action="store_true", default=False,
                     help="skip the high-t stretch acceptance criterion (also FUNDOM_SKIP_STRETCH=1)")


@pytest.fixture(scope="session")
def skip_stretch(request):
    env = os.environ.get("FUNDOM_SKIP_STRETCH", "").strip().lower() in ("1", "true", "yes", "on")
    return request.config.getoption("--skip-stretch") or env


@pytest.fixture(scope="session")
def acceptance_lines():
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def gamma_atlas():
    from fundom.acceptance import GAMMA_ATLAS_WINDOW
    from fundom.domains import gamma_domains
    return gamma_domains(GAMMA_ATLAS_WINDOW)


@pytest.fixture(scope="session")
def zeta_atlas():
    from fundom.acceptance import ZETA_ATLAS_TMAX
    from fundom.domains import zeta_domains
    return zeta_domains(ZETA_ATLAS_TMAX)


@pytest.fixture(scope="session")
def gamma_ref_assembly():
    from fundom.acceptance import GAMMA_REF_WINDOW
    from fundom.critpoints import crit_for
    from fundom.funcval import FunctionId
    from fundom.tracer.assembly import preimage_real_axis
    fid = FunctionId.gamma()
    return preimage_real_axis(fid, GAMMA_REF_WINDOW, crit=crit_for(fid, GAMMA_REF_WINDOW))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
