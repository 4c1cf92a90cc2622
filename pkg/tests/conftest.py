from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def model_2():
    from pseudobosons.calogero import build_model

    return build_model(2, 1, Fraction(3, 2))


@pytest.fixture(scope="session")
def fam_half():
    from pseudobosons.qho import PseudoBosonFamily

    return PseudoBosonFamily(1, Fraction(1, 2))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[num])
