import networkx as nx
import pytest

from oracles import embed


@pytest.fixture(scope="session")
def cube():
    return embed(nx.hypercube_graph(3))


@pytest.fixture(scope="session")
def icosahedron():
    return embed(nx.icosahedral_graph())


@pytest.fixture(scope="session")
def k4():
    return embed(nx.complete_graph(4))


@pytest.fixture(scope="session")
def triangle():
    return embed(nx.cycle_graph(3))
