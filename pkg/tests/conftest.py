import pytest

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--long", action="store_true", default=False,
                     help="run long end-to-end checks (live Curl27 attack, 5 TwinPeaks runs, n=7,8)")


def pytest_configure(config):
    config.addinivalue_line("markers", "long: slow end-to-end runs, enabled with --long")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="needs --long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def long_mode(request):
    return request.config.getoption("--long")


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
