import pytest

from invlab.family import BUILTIN_NAMES, builtin


@pytest.fixture(params=BUILTIN_NAMES)
def family(request):
    return builtin(request.param)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda s: (int(s.split()[0].rstrip("ab")), s)):
        terminalreporter.write_line(RESULTS[key])
