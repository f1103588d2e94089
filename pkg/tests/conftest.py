import os
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gendicke.model import ModelParams  # noqa: E402
from gendicke.transitions import GridSpec, classify_separatrix, surface  # noqa: E402

PHASE_GRID = GridSpec(0.0, 2.0, 0.0, 2.0, 21)

# criterion number -> list of (test id, passed, detail)
_CRITERIA: dict[int, list] = {}
_TITLES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        n, title = mark.args
        _TITLES[n] = title
        detail = getattr(item, "acceptance_detail", "")
        _CRITERIA.setdefault(n, []).append((item.name, rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA, key=lambda k: (int(str(k).rstrip("abcd")), str(k))):
        results = _CRITERIA[n]
        ok = all(p for _, p, _ in results)
        details = "; ".join(d for _, _, d in results if d)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {_TITLES[n]}"
                      + (f"  [{details}]" if details else ""))


@pytest.fixture
def detail(request):
    """Attach a one-line measurement summary to the acceptance report."""
    def put(text):
        prev = getattr(request.node, "acceptance_detail", "")
        request.node.acceptance_detail = f"{prev}, {text}" if prev else text
    return put


class _Surfaces:
    def __init__(self):
        self._cache = {}
        self.elapsed = {}

    def __call__(self, cfg, grid=PHASE_GRID):
        key = (cfg, str(grid))
        if key not in self._cache:
            t0 = time.perf_counter()
            s = surface(ModelParams.preset(cfg), grid, jobs=os.cpu_count() or 1)
            self.elapsed[key] = time.perf_counter() - t0
            self._cache[key] = classify_separatrix(s)
        return self._cache[key]


@pytest.fixture(scope="session")
def phase_surfaces():
    return _Surfaces()
