from fractions import Fraction as F
from pathlib import Path

import pytest

from netkernel.decomposer import parse_cyclic
from netkernel.generator import GenConfig, generate_instance
from netkernel.instance import ArcRef, parse_instance
from netkernel.solver import solve
from netkernel.support import load_support

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def arc(k: int, i: int, j: int) -> ArcRef:
    return ArcRef(k, i, j)


def worked_example(mode: str = "rational"):
    inst = parse_instance(fixture_text("example.inst"), mode=mode)
    support = load_support(inst, fixture_text("example.support"))
    cyclic = parse_cyclic(fixture_text("example.cyclic"))
    return inst, support, cyclic


def random_config(seed: int) -> GenConfig:
    """A small random generator configuration (at most 12 nodes, 4 commodities)."""
    import random

    rng = random.Random(10_000 + seed)
    commodities = rng.randint(1, 4)
    nodes = rng.randint(3, 12)
    extra = rng.randint(1, 4)
    coupled = rng.randint(0, 2) if commodities > 1 else 0
    side = rng.randint(0, max(0, min(3, commodities * extra - coupled)))
    return GenConfig(commodities, nodes, extra, side, coupled, seed)


def random_instance(seed: int, mode: str = "rational"):
    inst = generate_instance(random_config(seed))
    return inst if mode == "rational" else inst.with_mode(mode)


@pytest.fixture
def example():
    return worked_example()


@pytest.fixture
def example_result():
    inst, support, cyclic = worked_example()
    return solve(inst, support=support, cyclic=cyclic)


X253, X353 = arc(2, 5, 3), arc(3, 5, 3)
HALF = F(1, 2)
