import pytest

from volspec._backend import get_kernels


def _cython_kernels():
    try:
        return get_kernels("cython")
    except ImportError:
        return None


CYTHON = _cython_kernels()
PYTHON = get_kernels("python")

needs_cython = pytest.mark.skipif(CYTHON is None, reason="compiled extension not built")


ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    """Register one acceptance verdict for the terminal summary."""
    ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
