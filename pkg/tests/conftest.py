import pytest

from groupflow.kernels import available_backends

BACKENDS = sorted(available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param




def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
