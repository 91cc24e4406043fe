from pathlib import Path

import pytest

from avgctrl.graph import SparsityPattern

DATA = Path(__file__).parent / "data"

PATTERNS = {
    # self-looped root a1 feeding two leaves
    "fan": [("b1", "a1"), ("a1", "a1"), ("a1", "a2"), ("a1", "a3")],
    "fan_delooped": [("b1", "a1"), ("a1", "a2"), ("a1", "a3")],
    "dense_six": [
        ("b1", "a1"), ("b1", "a2"), ("a1", "a1"), ("a2", "a3"), ("a2", "a4"),
        ("a1", "a5"), ("a2", "a5"), ("a3", "a5"), ("a4", "a5"), ("a5", "a5"), ("a6", "a5"),
        ("a1", "a6"), ("a2", "a6"), ("a3", "a6"), ("a4", "a6"), ("a5", "a6"), ("a6", "a6"),
    ],
    "tree_six": [("b1", "a1"), ("a1", "a1"), ("a1", "a2"), ("a2", "a3"), ("a2", "a4"),
                 ("a3", "a5"), ("a5", "a6")],
    "path": [("b1", "a1"), ("a1", "a2"), ("a2", "a3")],
    "cycle3": [("b1", "a1"), ("a1", "a2"), ("a2", "a3"), ("a3", "a1")],
    "looped_chain": [("b1", "a1"), ("a1", "a1"), ("a1", "a2"), ("a2", "a2")],
}
SIZES = {"fan": 3, "fan_delooped": 3, "dense_six": 6, "tree_six": 6, "path": 3,
         "cycle3": 3, "looped_chain": 2}


def make(name: str) -> SparsityPattern:
    return SparsityPattern.from_edges(SIZES[name], 1, PATTERNS[name])


@pytest.fixture
def fan():
    return make("fan")


@pytest.fixture
def fan_delooped():
    return make("fan_delooped")


@pytest.fixture
def dense_six():
    return make("dense_six")


@pytest.fixture
def tree_six():
    return make("tree_six")


@pytest.fixture
def isolated():
    # a2 has no way in at all
    return SparsityPattern.from_edges(2, 1, [("b1", "a1"), ("a1", "a1")])


@pytest.fixture
def data_dir():
    return DATA
