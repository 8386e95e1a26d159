import mpmath
import pytest

from klab.precision import PrecisionContext

ACCEPTANCE = {}


def record(number, ok, detail):
    """Store an acceptance outcome for the terminal summary."""
    ACCEPTANCE[number] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def ctx40():
    return PrecisionContext(40, 10)


@pytest.fixture(scope="session")
def genus1_minus2i():
    from klab import genus1

    ctx = PrecisionContext(40, 10)
    with ctx.working():
        return genus1.genus1_data(mpmath.mpc(0, -2), ctx)


@pytest.fixture(scope="session")
def pii_solution():
    from klab import double_scaling

    return double_scaling.solve_pii_hm()
