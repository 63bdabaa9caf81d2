# tests/conftest.py

import json
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import settings
from rich.console import Console

from src.dinterval_lab.core.models import Instance
from tests.families import BALANCED_TRIANGLE, DISJOINT, TRIANGLE, WALECKI2

settings.register_profile("exact", deadline=None)
settings.load_profile("exact")


@pytest.fixture
def triangle():
    return TRIANGLE


@pytest.fixture
def balanced_triangle():
    return BALANCED_TRIANGLE


@pytest.fixture
def walecki2():
    return WALECKI2


@pytest.fixture
def disjoint():
    return DISJOINT


@pytest.fixture
def path3():
    """The path a - b - c with vertex weights (1, 2, 1)."""
    graph = nx.path_graph(3)
    nx.set_node_attributes(graph, {0: 1, 1: 2, 2: 1}, "weight")
    return graph


@pytest.fixture
def quiet_console():
    return Console(quiet=True)


@pytest.fixture
def write_instance(tmp_path):
    """Writes a family (and optional weights) as instance JSON and returns the path."""

    def write(family, weights=None, name="instance.json") -> Path:
        path = tmp_path / name
        path.write_text(Instance.of(family, weights).model_dump_json(indent=2, exclude_none=True), encoding="utf-8")
        return path

    return write


@pytest.fixture
def write_json(tmp_path):
    def write(payload, name) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return write
