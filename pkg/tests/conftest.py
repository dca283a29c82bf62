import pytest

from contactcurv.harness import gallery_paths, load_manifest, sample_points

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def gallery():
    return {m.name: m for m in (load_manifest(p) for p in gallery_paths())}


@pytest.fixture(scope="session")
def gallery_points(gallery):
    return {name: sample_points(m.manifold.chart, 50) for name, m in gallery.items()}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
