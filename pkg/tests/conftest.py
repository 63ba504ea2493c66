from __future__ import annotations

import pathlib
import sys
import time
from dataclasses import dataclass

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from attackpath import ThreatGraph, load_graph_file, oracle_enumerate, search
from randgraphs import suite

FIXTURES = pathlib.Path(__file__).resolve().parent / "fixtures"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"

RANDOM_SUITE_SIZE = 500


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / f"{name}.json"


def load_fixture(name: str) -> ThreatGraph:
    return load_graph_file(fixture_path(name))


@pytest.fixture(scope="session")
def fig4a() -> ThreatGraph:
    return load_fixture("fig4a")


@pytest.fixture(scope="session")
def fig4a_nowatch() -> ThreatGraph:
    return load_fixture("fig4a_nowatch")


@pytest.fixture(scope="session")
def fig6a() -> ThreatGraph:
    return load_fixture("fig6a")


@pytest.fixture(scope="session")
def fig6b() -> ThreatGraph:
    return load_fixture("fig6b")


@pytest.fixture(scope="session")
def persistence() -> ThreatGraph:
    return load_fixture("persistence")


@dataclass(frozen=True)
class SuiteRun:
    """(graph, request, SearchResult, oracle plan list) tuples plus the
    wall-clock seconds the whole corpus took to plan and enumerate."""

    runs: list
    elapsed_seconds: float


@pytest.fixture(scope="session")
def random_suite() -> SuiteRun:
    """One planner + oracle run over the shared random-graph corpus.

    Several acceptance criteria consume the same corpus; computing it once
    keeps the whole suite inside the runtime budget.
    """
    runs = []
    started = time.perf_counter()
    for graph, request in suite(RANDOM_SUITE_SIZE):
        result = search(graph, request)
        reference = oracle_enumerate(graph, request)
        runs.append((graph, request, result, reference))
    return SuiteRun(runs, time.perf_counter() - started)
