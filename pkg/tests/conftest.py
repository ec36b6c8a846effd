import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def custom_qa_file() -> dict:
    return json.loads((FIXTURES / "task_custom_qa.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def sentiment_poems_file() -> dict:
    return json.loads((FIXTURES / "task_sentiment_poems.json").read_text(encoding="utf-8"))


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(cid, desc): marks a test as one acceptance criterion"
    )


def pytest_runtest_makereport(item, call):
    if call.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    cid = marker.args[0]
    desc = marker.args[1] if len(marker.args) > 1 else item.name
    outcome = "FAIL" if call.excinfo is not None else "PASS"
    _ACCEPTANCE_RESULTS[cid] = (outcome, desc)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE_RESULTS):
        outcome, desc = _ACCEPTANCE_RESULTS[cid]
        terminalreporter.write_line(f"[{outcome}] {cid}: {desc}")
