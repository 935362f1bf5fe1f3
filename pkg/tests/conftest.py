import time

import pytest

from tricomplex.oracle import load_grid, multibrot_grid, save_grid


# (criterion number, title, passed, detail, seconds)
ACCEPTANCE: list[tuple[int, str, bool, str, float]] = []

# Oracle windows shared by several tests; each comfortably contains the set.
M2_WINDOW = (-2.1, -1.25, 0.6, 1.25)
M3_WINDOW = (-1.25, -1.25, 1.25, 1.25)


class GridCache:
    """Oracle grids kept on disk in the pytest cache, keyed by name."""

    def __init__(self, directory):
        self.directory = directory
        self.memory = {}
        self.build_seconds = {}

    def get(self, name, build):
        if name in self.memory:
            return self.memory[name]
        path = self.directory / f"{name}.tcgrid"
        if path.exists():
            grid = load_grid(path)
        else:
            t0 = time.perf_counter()
            grid = build()
            self.build_seconds[name] = time.perf_counter() - t0
            save_grid(path, grid)
        self.memory[name] = grid
        return grid


@pytest.fixture(scope="session")
def grids(request):
    return GridCache(request.config.cache.mkdir("oracle-grids"))


@pytest.fixture(scope="session")
def m2_grid(grids):
    return grids.get("m2", lambda: multibrot_grid(2, M2_WINDOW))


@pytest.fixture(scope="session")
def m3_grid(grids):
    return grids.get("m3", lambda: multibrot_grid(3, M3_WINDOW))


@pytest.fixture(scope="session")
def acceptance():
    def record(number, title, passed, detail, seconds):
        ACCEPTANCE.append((number, title, bool(passed), detail, seconds))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, title, passed, detail, seconds in sorted(ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail} ({seconds:.2f} s)")
