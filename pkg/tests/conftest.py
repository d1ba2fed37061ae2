import re
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ergocount import _backend  # noqa: E402


@pytest.fixture(params=["compiled", "python"])
def kernels(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "compiled":
        if not _backend.COMPILED:
            pytest.skip("compiled extension not built")
        mod = _backend.kernels
    else:
        mod = _backend.pure
    monkeypatch.setattr(_backend, "kernels", mod)
    return mod


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda s: _key(s.split()[1])):
            terminalreporter.write_line(line)


def _key(tag):
    lead = re.match(r"\d+", tag).group()
    return (int(lead), tag)
