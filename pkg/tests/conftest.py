import pytest

from hyperlim import INDICATOR, StepHypergraphon, UniformHypergraph


def build_fixture_w() -> StepHypergraphon:
    """k=3 indicator at l=2: edge iff the top box and all three pair boxes are 0.

    Edge probability (1/2)**4 = 1/16; the standard fixture for the
    sampling, convergence, and regularity tests.
    """
    values = {}
    for singles in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)]:
        values[singles + (0, 0, 0, 0)] = 1.0
    return StepHypergraphon(3, 2, INDICATOR, values)


def build_half_w() -> StepHypergraphon:
    """k=2 indicator at l=2: edge iff the pair box is 0 (probability 1/2)."""
    values = {}
    for singles in [(0, 0), (0, 1), (1, 1)]:
        values[singles + (0,)] = 1.0
    return StepHypergraphon(2, 2, INDICATOR, values)


def triangle() -> UniformHypergraph:
    return UniformHypergraph(2, 3, [(0, 1), (0, 2), (1, 2)])


def single_triple() -> UniformHypergraph:
    return UniformHypergraph(3, 3, [(0, 1, 2)])


def shared_pair_triples() -> UniformHypergraph:
    """Two 3-edges sharing a pair of vertices."""
    return UniformHypergraph(3, 4, [(0, 1, 2), (0, 1, 3)])


@pytest.fixture
def fixture_w():
    return build_fixture_w()


@pytest.fixture
def half_w():
    return build_half_w()
