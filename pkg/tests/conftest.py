import functools

import pytest

from tameblocks.atlas import build


def pytest_addoption(parser):
    parser.addoption("--extended", action="store_true", help="run the n=5 extended-tier checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "extended: slow n=5 checks, enabled with --extended")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--extended"):
        return
    skip = pytest.mark.skip(reason="extended tier; pass --extended")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@functools.lru_cache(maxsize=None)
def built(recipe: str, seed: int = 0):
    """Atlas groups are expensive enough to share across test modules."""
    return build(recipe, seed=seed).group


@pytest.fixture(scope="session")
def atlas_group():
    return built


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=str):
        title, ok = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {title}")
