import pytest

from sqfock import kernels

ACCEPTANCE_LINES = []


@pytest.fixture
def backend_switch():
    """Restore the kernel backend after a test that changes it."""
    previous = kernels.backend()
    yield kernels.set_backend
    kernels.set_backend(previous)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
