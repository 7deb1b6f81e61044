import pytest

from partition_pipeline.graph.core import Graph, PartitionMap


def build(num_vertices, edges):
    graph = Graph()
    for _ in range(num_vertices):
        graph.add_vertex()
    for edge in edges:
        graph.add_edge(*edge)
    return graph


@pytest.fixture
def triangle():
    return build(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def path():
    """a -> b -> c"""
    return build(3, [(0, 1), (1, 2)])


@pytest.fixture
def k4():
    return build(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def two_triangles():
    """triangles 0-1-2 and 3-4-5 joined by the bridge 2-3"""
    return build(
        6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]
    )


@pytest.fixture
def natural_split():
    return PartitionMap([0, 0, 0, 1, 1, 1], 2)
