from importlib import resources
from pathlib import Path

import pytest

from peria.graphcore.graphs import load_graph
from peria.presentation import load_presentation

CORPUS = Path(str(resources.files("peria") / "corpus"))


def corpus(name: str) -> Path:
    return CORPUS / name


def pres(name: str):
    return load_presentation(CORPUS / f"{name}.peria")


def graph(name: str):
    return load_graph(CORPUS / f"{name}.graph")


@pytest.fixture
def load():
    return pres


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = [mod.RESULTS[k] for k in sorted(mod.RESULTS)] if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
