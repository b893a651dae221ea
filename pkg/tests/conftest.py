"""
Pytest shared fixtures.

Instances used by several modules are built once per session; every builder
is seeded, so the fixtures are identical across runs and xdist workers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

import pytest
from click.testing import CliRunner

from core.constructions import LabeledTree, MndInstance, build_M1, build_Mnd, build_tree
from core.models import BlockParams
from core.shift_graph import OrderedGraph, random_ordered_graph

logger = logging.getLogger(__name__)

FIXED_SEED = 7


@dataclass(frozen=True)
class RandomGraphCase:
    """A seeded random ordered graph together with its generation parameters."""

    n: int
    seed: int
    graph: OrderedGraph


@pytest.fixture(scope="session")
def mnd_8_2() -> MndInstance:
    """M(8, 2) with epsilon 1/2 and seed 7 (exhaustively certified)."""
    return build_Mnd(BlockParams(n=8, d=2, epsilon="1/2", seed=FIXED_SEED))


@pytest.fixture(scope="session")
def mnd_16_2() -> MndInstance:
    return build_Mnd(BlockParams(n=16, d=2, epsilon="1/2", seed=FIXED_SEED))


@pytest.fixture(scope="session")
def mnd_16_3() -> MndInstance:
    return build_Mnd(BlockParams(n=16, d=3, epsilon="1/2", seed=FIXED_SEED))


@pytest.fixture(scope="session")
def m1_8() -> OrderedGraph:
    return build_M1(8)


@pytest.fixture(scope="session")
def tree_j3() -> LabeledTree:
    """The canonical J = 3 tree: level sizes 1, 1, 2, 72."""
    return build_tree(3)


@pytest.fixture(scope="session")
def small_random_graphs() -> List[RandomGraphCase]:
    """100 seeded random graphs with at most 18 edges."""
    cases = []
    for seed in range(100):
        n = 5 + seed % 5
        graph = random_ordered_graph(n, seed, edge_count=min(18, n * (n - 1) // 2, 6 + seed % 13))
        cases.append(RandomGraphCase(n=n, seed=seed, graph=graph))
    return cases


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def workdir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run CLI commands inside a scratch directory with no ambient seed."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SHIFTLAB_SEED", raising=False)
    return tmp_path
