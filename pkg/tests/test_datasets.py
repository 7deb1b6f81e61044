import networkx as nx
import numpy as np
import pytest

from partition_pipeline.datasets.filesystem import FsGenSpec, generate_fs
from partition_pipeline.datasets.gis import (
    CITY,
    CITY_DISTANCE,
    LAT_RANGE,
    LON_RANGE,
    GisGenSpec,
    coordinates,
    generate_gis,
    max_speed,
)
from partition_pipeline.datasets.social import SocialGenSpec, generate_social
from partition_pipeline.datasets.statistics import (
    clustering_coefficient,
    degree_histogram,
    degrees,
    describe,
    to_simple_networkx,
)
from partition_pipeline.datasets.topology import (
    DatasetSpecError,
    generate_fully_connected,
    generate_planted_partition,
    generate_random,
)
from partition_pipeline.graph.core import (
    LATITUDE,
    LONGITUDE,
    EdgeLabel,
    PartitionMap,
    VertexKind,
)
from partition_pipeline.graph.metrics import edge_cut
from partition_pipeline.partitioner.didic import DidicConfig, run_didic

from .conftest import build

EVENT_LABELS = {EdgeLabel.HAS_EVENT, EdgeLabel.ACTOR, EdgeLabel.TARGET}


@pytest.fixture(scope="module")
def fs_graph():
    return generate_fs(FsGenSpec(seed=3))


@pytest.fixture(scope="module")
def gis_graph():
    return generate_gis(GisGenSpec(seed=3))


@pytest.fixture(scope="module")
def social_graph():
    return generate_social(SocialGenSpec(seed=3))


def test_clustering_triangle(triangle):
    assert clustering_coefficient(triangle) == pytest.approx(1.0)


def test_clustering_star():
    star = build(5, [(0, leaf) for leaf in range(1, 5)])
    assert clustering_coefficient(star) == 0.0


def test_clustering_triangle_with_pendant():
    graph = build(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    # 1, 1, one of three neighbor pairs linked, 0
    assert clustering_coefficient(graph) == pytest.approx((2 + 1 / 3) / 4)


def test_clustering_empty_graph():
    assert clustering_coefficient(build(0, [])) == 0.0


def test_describe(triangle):
    summary = describe(triangle)
    assert summary["vertices"] == 3
    assert summary["edges"] == 3
    assert summary["average_degree"] == 2.0
    assert summary["kinds"] == {"GENERIC": 3}


def test_degree_histogram(path):
    assert degree_histogram(path).tolist() == [0, 2, 1]
    assert degree_histogram(path, "OUT").tolist() == [1, 2]


def test_fully_connected():
    graph = generate_fully_connected(5)
    assert graph.num_edges == 10
    assert all(edge.start < edge.end for edge in graph.edges)


def test_random_graph_edge_count():
    graph = generate_random(50, 120, 4)
    assert graph.num_vertices == 50
    assert graph.num_edges == 120
    assert generate_random(50, 120, 4).structure_hash() == (
        graph.structure_hash()
    )


def test_planted_partition_map():
    graph, planted = generate_planted_partition([10, 20], 0.5, 0.01, 1)
    assert graph.num_vertices == 30
    assert planted.sizes().tolist() == [10, 20]


def test_fs_is_deterministic(fs_graph):
    assert generate_fs(FsGenSpec(seed=3)).structure_hash() == (
        fs_graph.structure_hash()
    )


def test_fs_size_and_kinds(fs_graph):
    assert fs_graph.num_vertices <= 10_000
    assert len(fs_graph.vertices_of_kind(VertexKind.ORG)) == 5
    assert len(fs_graph.vertices_of_kind(VertexKind.USER)) == 20


def test_fs_mostly_events(fs_graph):
    events = fs_graph.vertices_of_kind(VertexKind.EVENT)
    assert len(events) > fs_graph.num_vertices / 2


def test_fs_events_have_actor_and_target(fs_graph):
    for vid in fs_graph.vertices_of_kind(VertexKind.EVENT):
        labels = sorted(edge.label for edge in fs_graph.incident(vid, "OUT"))
        assert labels == [EdgeLabel.ACTOR, EdgeLabel.TARGET]


def test_fs_folder_out_degree_peak(fs_graph):
    folders = fs_graph.vertices_of_kind(VertexKind.FOLDER)
    histogram = np.bincount(
        [fs_graph.out_degree_count(vid) for vid in folders]
    )
    assert 30 <= int(np.argmax(histogram)) <= 35


def test_fs_file_out_degree(fs_graph):
    for vid in fs_graph.vertices_of_kind(VertexKind.FILE):
        assert 1 <= fs_graph.out_degree_count(vid) <= 2


def test_fs_tree_is_acyclic(fs_graph):
    tree = nx.DiGraph()
    tree.add_nodes_from(range(fs_graph.num_vertices))
    tree.add_edges_from(
        (edge.start, edge.end)
        for edge in fs_graph.edges
        if edge.label not in EVENT_LABELS
    )
    assert nx.is_directed_acyclic_graph(tree)


def test_fs_every_entity_has_one_parent(fs_graph):
    for vid in fs_graph.vertices_of_kind(VertexKind.FOLDER, VertexKind.FILE):
        parents = [
            edge
            for edge in fs_graph.incident(vid, "IN")
            if edge.label in (EdgeLabel.CHILD, EdgeLabel.OWNS)
        ]
        assert len(parents) == 1


def test_fs_tiny():
    graph = generate_fs(FsGenSpec(seed=1, target_vertices=30, num_orgs=1))
    assert graph.num_vertices <= 30
    assert len(graph.vertices_of_kind(VertexKind.ORG)) == 1
    for vid in graph.vertices_of_kind(VertexKind.USER):
        assert len(graph.incident(vid, "OUT", EdgeLabel.OWNS)) == 1


@pytest.mark.parametrize(
    "changes",
    [
        {"target_vertices": 10},
        {"folder_children": (5, 3)},
        {"subfolders": (0, 40)},
        {"num_orgs": 0},
        {"depth": -1},
    ],
)
def test_fs_rejects_bad_specs(changes):
    with pytest.raises(DatasetSpecError):
        generate_fs(FsGenSpec(**changes))


def test_gis_is_deterministic(gis_graph):
    again = generate_gis(GisGenSpec(seed=3))
    assert again.structure_hash() == gis_graph.structure_hash()
    assert again.vertices == gis_graph.vertices


def test_gis_is_connected(gis_graph):
    assert nx.is_connected(to_simple_networkx(gis_graph))


def test_gis_coordinates_in_box(gis_graph):
    for vertex in gis_graph.vertices:
        assert LON_RANGE[0] <= vertex.properties[LONGITUDE] <= LON_RANGE[1]
        assert LAT_RANGE[0] <= vertex.properties[LATITUDE] <= LAT_RANGE[1]
        assert 0 <= vertex.properties[CITY] < 5
        assert vertex.properties[CITY_DISTANCE] >= 0


def test_gis_degree_shape(gis_graph):
    counts = degrees(gis_graph)
    n = gis_graph.num_vertices
    assert np.count_nonzero(counts <= 3) >= 0.4 * n
    assert np.count_nonzero((counts >= 4) & (counts <= 14)) >= 0.4 * n


def test_gis_cities_cluster_more(gis_graph):
    spec = GisGenSpec()
    urban = range(spec.num_cities * spec.urban_vertices_per_city)
    assert clustering_coefficient(gis_graph, urban) > clustering_coefficient(
        gis_graph
    )


def test_gis_weights(gis_graph):
    speed = max_speed(gis_graph)
    for edge in gis_graph.edges:
        assert 0 < edge.weight <= 1
        (x0, y0), (x1, y1) = coordinates(
            gis_graph, edge.start
        ), coordinates(gis_graph, edge.end)
        assert np.hypot(x1 - x0, y1 - y0) / speed <= edge.weight + 1e-12


def test_gis_single_city():
    spec = GisGenSpec(
        seed=2, num_cities=1, urban_vertices_per_city=200, rural_vertices=0
    )
    graph = generate_gis(spec)
    assert graph.num_vertices == 200
    assert nx.is_connected(to_simple_networkx(graph))
    assert {vertex.properties[CITY] for vertex in graph.vertices} == {0}


@pytest.mark.parametrize(
    "changes",
    [
        {"num_cities": 1},
        {"num_cities": 6},
        {"city_centers": [("Nowhere", 5.0, 45.0)], "num_cities": 1},
        {"urban_vertices_per_city": 3},
        {"rural_vertices": -1},
    ],
)
def test_gis_rejects_bad_specs(changes):
    with pytest.raises(DatasetSpecError):
        generate_gis(GisGenSpec(**changes))


def test_social_is_deterministic(social_graph):
    again = generate_social(SocialGenSpec(seed=3))
    assert again.structure_hash() == social_graph.structure_hash()


def test_social_edge_ratio(social_graph):
    ratio = social_graph.num_edges / social_graph.num_vertices
    assert ratio == pytest.approx(1.4, abs=0.1)


def test_social_simple(social_graph):
    pairs = [(edge.start, edge.end) for edge in social_graph.edges]
    assert all(u != v for u, v in pairs)
    assert len(set(pairs)) == len(pairs)


def test_social_heavy_tail(social_graph):
    assert social_graph.num_vertices == 10_000
    out = degrees(social_graph, "OUT")
    median = float(np.median(out))
    assert median >= 1.0
    assert out.max() >= 50 * median
    assert np.count_nonzero(out >= 10 * median) > 0


def test_social_three_vertices():
    first = generate_social(SocialGenSpec(seed=9, target_vertices=3))
    second = generate_social(SocialGenSpec(seed=9, target_vertices=3))
    assert first.num_vertices == 3
    assert first.num_edges == 4
    assert first.structure_hash() == second.structure_hash()


def test_social_rejects_bad_specs():
    with pytest.raises(DatasetSpecError):
        generate_social(SocialGenSpec(exponent=1.0))
    with pytest.raises(DatasetSpecError):
        generate_social(SocialGenSpec(target_vertices=0))


@pytest.mark.slow
def test_didic_finds_planted_partition():
    good = 0
    for seed in range(5):
        graph, _ = generate_planted_partition([200, 200], 0.1, 0.005, seed)
        rng = np.random.default_rng(seed)
        initial = PartitionMap(rng.integers(2, size=graph.num_vertices), 2)
        config = DidicConfig(k=2, seed=seed)
        result = run_didic(graph, initial, config, progress=False)
        good += edge_cut(graph, result)[1] < 0.10
    assert good >= 4
