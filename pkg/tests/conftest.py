import os
import tempfile

import pytest

# Keep the grid cache out of the user's home directory for the whole run.
os.environ["TWEDGE_CACHE_DIR"] = tempfile.mkdtemp(prefix="twedge-test-cache-")

from twedge.tw import default_grid  # noqa: E402

# F1 percentiles at conventional levels, and the levels
TABLE_ABSCISSAE = (-3.8954, -3.1804, -2.7824, -1.9104, -1.2686, -0.5923, 0.4501, 0.9793, 2.0234)
TABLE_LEVELS = (0.01, 0.05, 0.10, 0.30, 0.50, 0.70, 0.90, 0.95, 0.99)


@pytest.fixture(scope="session")
def grid():
    return default_grid()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key])
