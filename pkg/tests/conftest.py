"""Shared fixtures: paths to the shipped data files and parsed forms of them."""

import csv
from pathlib import Path

import pytest

from smi.dataset import load_indicator_metadata

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def indicators_path() -> Path:
    return DATA_DIR / "indicators.csv"


@pytest.fixture(scope="session")
def observations_path() -> Path:
    return DATA_DIR / "observations_synthetic.csv"


@pytest.fixture(scope="session")
def gini_path() -> Path:
    return DATA_DIR / "gini.csv"


@pytest.fixture(scope="session")
def registry(indicators_path):
    return load_indicator_metadata(indicators_path)


@pytest.fixture(scope="session")
def reference_rows() -> list[tuple[str, float, str, int]]:
    """Per-state (name, score, category, rank) from the reference results table."""
    rows = []
    with open(DATA_DIR / "reference_scores.csv", newline="", encoding="utf-8") as fh:
        for record in csv.DictReader(fh):
            rows.append((record["state"], float(record["smi"]),
                         record["category"], int(record["rank"])))
    assert len(rows) == 22
    return rows


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or item.get_closest_marker("acceptance") is None:
        return
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is None:
        return
    if report.passed:
        status = "PASS"
    elif report.skipped:
        status = "SKIP"
    else:
        status = "FAIL"
    reporter.write_line(f"[acceptance] {item.name}: {status}")
