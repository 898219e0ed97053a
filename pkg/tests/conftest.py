import sys
from pathlib import Path

import pytest

from aml2rdf import MappingConfig, map_full, parse_document

FIXTURES = Path(__file__).parent / "fixtures"
BASE = "urn:aml:test/"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str, base: str = BASE):
    """(document, enriched graph, config) for a fixture file."""
    config = MappingConfig(base_iri=base)
    doc, _ = parse_document(FIXTURES / name)
    graph, _ = map_full(doc, config)
    return doc, graph, config


@pytest.fixture(scope="session")
def four_tank():
    return load("four_tank.aml", "urn:aml:four_tank/")


@pytest.fixture(scope="session")
def role_hierarchy():
    return load("role_hierarchy.aml")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
