import io

import numpy as np
import pytest

from partition_pipeline.datasets.topology import (
    generate_planted_partition,
    generate_random,
)
from partition_pipeline.graph.core import (
    EdgeLabel,
    Graph,
    PartitionMap,
    VertexKind,
    undirected_view,
)
from partition_pipeline.graph.formats import (
    GraphFormatError,
    load_gml,
    read_chaco,
    read_gml,
    read_partition_map,
    write_chaco,
    write_gml,
    write_partition_map,
)

from .conftest import build


def chaco(text):
    return read_chaco(io.StringIO(text))


def dump_chaco(graph):
    sink = io.StringIO()
    write_chaco(graph, sink)
    return sink.getvalue()


def test_read_chaco_path():
    graph = chaco("3 2 000\n2\n1 3\n2\n")
    assert graph.num_vertices == 3
    assert [(e.start, e.end, e.weight) for e in graph.edges] == [
        (0, 1, 1.0),
        (1, 2, 1.0),
    ]


def test_read_chaco_isolated_vertex():
    graph = chaco("1 0 000\n\n")
    assert graph.num_vertices == 1
    assert graph.num_edges == 0


def test_read_chaco_skips_comments_and_reads_weights():
    graph = chaco("% weighted\n2 1 001\n2 0.25\n1 0.25\n")
    assert graph.edges[0].weight == 0.25


def test_read_chaco_skips_vertex_weights():
    graph = chaco("2 1 011\n7 2 0.5\n3 1 0.5\n")
    assert graph.num_edges == 1
    assert graph.edges[0].weight == 0.5


@pytest.mark.parametrize(
    "text",
    [
        "3 3 000\n2\n1 3\n2\n",
        "3 2 000\n2\n1 x\n2\n",
        "3 2 000\n2\n1 4\n2\n",
        "2 1 000\n2\n",
        "2 1 000\n2\n1\n1\n",
        "2 1 000\n1\n\n",
        "",
        "2\n",
    ],
)
def test_read_chaco_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        chaco(text)


def test_read_chaco_error_names_line():
    with pytest.raises(GraphFormatError) as info:
        chaco("3 2 000\n2\n1 9\n2\n")
    assert info.value.line == 3
    assert str(info.value).startswith("line 3:")


def test_write_chaco_empty():
    assert dump_chaco(Graph()) == "0 0 000\n"


def test_write_chaco_triangle(triangle):
    assert dump_chaco(triangle) == "3 3 000\n2 3\n1 3\n1 2\n"


def test_write_chaco_weighted():
    graph = build(2, [(0, 1, 0.5)])
    assert dump_chaco(graph) == "2 1 001\n2 0.5\n1 0.5\n"


def test_chaco_round_trip_equals_view(two_triangles):
    two_triangles.add_edge(3, 2, 0.5)
    reread = chaco(dump_chaco(two_triangles))
    original = undirected_view(two_triangles)
    view = undirected_view(reread)
    assert np.array_equal(view.src, original.src)
    assert np.array_equal(view.dst, original.dst)
    assert np.array_equal(view.weight, original.weight)


def seeded_graph(seed):
    """small random graph, odd seeds carry planted communities and weights"""
    rng = np.random.default_rng(seed)
    if seed % 2 == 0:
        n = int(rng.integers(1, 30))
        m = int(rng.integers(0, n * (n - 1) // 2 + 1))
        return generate_random(n, m, seed)
    sizes = rng.integers(1, 8, size=int(rng.integers(1, 5))).tolist()
    graph, _ = generate_planted_partition(sizes, 0.6, 0.05, seed)
    weights = rng.uniform(0.01, 1.0, size=graph.num_edges)
    return build(
        graph.num_vertices,
        [
            (edge.start, edge.end, float(weight))
            for edge, weight in zip(graph.edges, weights)
        ],
    )


def test_chaco_round_trip_on_seeded_graphs():
    for seed in range(1000):
        graph = seeded_graph(seed)
        reread = chaco(dump_chaco(graph))
        original = undirected_view(graph)
        view = undirected_view(reread)
        assert reread.num_vertices == graph.num_vertices, seed
        assert np.array_equal(view.src, original.src), seed
        assert np.array_equal(view.dst, original.dst), seed
        assert np.array_equal(view.weight, original.weight), seed


def gml_round_trip(graph, partition_map=None):
    sink = io.StringIO()
    write_gml(graph, sink, partition_map)
    return load_gml(io.StringIO(sink.getvalue()))


def test_read_gml_single_node():
    graph = read_gml(io.StringIO("graph [ node [ id 0 ] ]"))
    assert graph.num_vertices == 1
    assert graph.num_edges == 0


def test_read_gml_path():
    text = """graph [
  directed 1
  node [ id 4 ]
  node [ id 9 ]
  edge [ source 4 target 9 ]
]
"""
    graph = read_gml(io.StringIO(text))
    assert graph.num_vertices == 2
    assert [(e.start, e.end) for e in graph.edges] == [(0, 1)]


def test_read_gml_malformed():
    with pytest.raises(GraphFormatError):
        read_gml(io.StringIO("graph [ node [ id 0 ]"))


def test_gml_round_trip_keeps_kinds_coordinates_and_partitions():
    graph = Graph()
    graph.add_vertex(
        VertexKind.GIS_POINT, latitude=44.43, longitude=26.1, city=0
    )
    graph.add_vertex(
        VertexKind.GIS_POINT,
        latitude=45.123456789,
        longitude=21.000000001,
        city=3,
    )
    graph.add_vertex(VertexKind.USER)
    graph.add_edge(0, 1, 0.123456789, EdgeLabel.ROAD)
    graph.add_edge(1, 0, 0.3, EdgeLabel.ROAD)
    graph.add_edge(2, 0, 1.0, EdgeLabel.LINK)
    pm = PartitionMap([1, 0, 1], 2)

    reread, reread_pm = gml_round_trip(graph, pm)
    assert reread.vertices == graph.vertices
    assert reread.edges == graph.edges
    assert reread_pm == pm


def mixed_graph(seed):
    """random graph of every vertex kind and edge label with a partition"""
    rng = np.random.default_rng(seed)
    kinds = list(VertexKind)
    labels = list(EdgeLabel)
    graph = Graph()
    n = int(rng.integers(1, 20))
    for _ in range(n):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind is VertexKind.GIS_POINT:
            graph.add_vertex(
                kind,
                latitude=float(rng.uniform(-90.0, 90.0)),
                longitude=float(rng.uniform(-180.0, 180.0)),
                city=int(rng.integers(10)),
            )
        else:
            graph.add_vertex(kind)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    count = int(rng.integers(0, min(len(pairs), 3 * n) + 1))
    for index in rng.permutation(len(pairs))[:count]:
        start, end = pairs[index]
        graph.add_edge(
            start,
            end,
            float(rng.uniform(0.01, 1.0)),
            labels[int(rng.integers(len(labels)))],
        )
    k = int(rng.integers(1, 5))
    assignment = rng.integers(k, size=n).tolist()
    assignment[int(rng.integers(n))] = k - 1
    return graph, PartitionMap(assignment, k)


def test_gml_round_trip_on_seeded_mixed_graphs():
    for seed in range(1000):
        graph, pm = mixed_graph(seed)
        reread, reread_pm = gml_round_trip(graph, pm)
        assert reread.vertices == graph.vertices, seed
        assert reread.edges == graph.edges, seed
        assert reread_pm == pm, seed


def test_gml_without_partitions(triangle):
    reread, pm = gml_round_trip(triangle)
    assert pm is None
    assert reread.edges == triangle.edges


def test_gml_rejects_reserved_property_names():
    graph = Graph()
    graph.add_vertex(label="x")
    with pytest.raises(ValueError):
        write_gml(graph, io.StringIO())


def test_partition_map_file_round_trip():
    pm = PartitionMap([0, 3, 2, 1, 3], 4)
    sink = io.StringIO()
    write_partition_map(pm, sink)
    assert sink.getvalue() == "4 5\n0\n3\n2\n1\n3\n"
    assert read_partition_map(io.StringIO(sink.getvalue())) == pm


@pytest.mark.parametrize(
    "text", ["", "2\n0\n", "2 2\n0\n", "2 2\n0\nx\n", "2 2\n0\n5\n"]
)
def test_partition_map_file_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        read_partition_map(io.StringIO(text))
