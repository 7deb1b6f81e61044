import numpy as np
import pytest

from partition_pipeline.datasets.filesystem import FsGenSpec, generate_fs
from partition_pipeline.datasets.gis import CITY, GisGenSpec, generate_gis
from partition_pipeline.datasets.social import SocialGenSpec, generate_social
from partition_pipeline.graph.core import (
    EdgeLabel,
    Graph,
    PartitionMap,
    VertexKind,
)
from partition_pipeline.graph.metrics import predicted_percentage_global
from partition_pipeline.partitioner.baseline import partition_random
from partition_pipeline.simulator.emulator import Emulator
from partition_pipeline.simulator.logs import OperationKind, OperationRecord
from partition_pipeline.simulator.operations import (
    GisStartMode,
    TrafficSummary,
    WorkloadError,
    WorkloadSpec,
    astar_search,
    exec_fs_op,
    exec_gis_op,
    exec_social_op,
    foaf_search,
    gen_fs_ops,
    gen_gis_ops,
    generate_workload,
    replay,
    sample_walk_lengths,
    total_traffic,
)


def fs_record(start, end):
    return OperationRecord(0, OperationKind.FS_BFS, (start, end))


@pytest.fixture
def small_fs():
    """user owning root folder 1 with children folder 2 and folder 3"""
    graph = Graph()
    user = graph.add_vertex(VertexKind.USER)
    root = graph.add_vertex(VertexKind.FOLDER)
    graph.add_edge(user, root, label=EdgeLabel.OWNS)
    for _ in range(2):
        child = graph.add_vertex(VertexKind.FOLDER)
        graph.add_edge(root, child, label=EdgeLabel.CHILD)
    return graph


def test_fs_start_is_end(small_fs):
    emulator = Emulator(small_fs, PartitionMap.uniform(4, 1))
    assert exec_fs_op(emulator, fs_record(1, 1)) == TrafficSummary(1, 0)


def test_fs_depth_one(small_fs):
    emulator = Emulator(small_fs, PartitionMap.uniform(4, 1))
    # lookup, two child edges, end vertex and id of both children
    assert exec_fs_op(emulator, fs_record(1, 3)) == TrafficSummary(7, 0)


def test_fs_depth_one_crossing(small_fs):
    emulator = Emulator(small_fs, PartitionMap([0, 0, 0, 1], 2))
    assert exec_fs_op(emulator, fs_record(1, 3)) == TrafficSummary(6, 1)


def test_fs_unreachable(small_fs):
    emulator = Emulator(small_fs, PartitionMap.uniform(4, 1))
    with pytest.raises(WorkloadError):
        exec_fs_op(emulator, fs_record(2, 3))


def test_fs_ends_follow_degree():
    graph = Graph()
    user = graph.add_vertex(VertexKind.USER)
    folder = graph.add_vertex(VertexKind.FOLDER)
    file = graph.add_vertex(VertexKind.FILE)
    graph.add_edge(user, folder, label=EdgeLabel.OWNS)
    graph.add_edge(folder, file, label=EdgeLabel.CHILD)
    log = gen_fs_ops(graph, WorkloadSpec(num_ops=6000, seed=2))
    ends = np.array([record.end for record in log])
    # the folder has two incident edges, the file one
    assert np.mean(ends == folder) == pytest.approx(2 / 3, abs=0.03)
    for record in log:
        if record.end == folder:
            assert record.start == folder
        else:
            assert record.start in (folder, file)


def test_fs_ops_are_deterministic(small_fs):
    spec = WorkloadSpec(num_ops=50, seed=4)
    assert gen_fs_ops(small_fs, spec) == gen_fs_ops(small_fs, spec)
    assert gen_fs_ops(small_fs, spec).seed == 4


@pytest.fixture
def weighted_path():
    """0 - 1 - 2 at weight 0.3 each plus a direct 0 - 2 road at 0.9"""
    graph = Graph()
    for lon in (20.0, 20.1, 20.2):
        graph.add_vertex(
            VertexKind.GIS_POINT, latitude=45.0, longitude=lon, **{CITY: 0}
        )
    graph.add_edge(0, 1, 0.3, EdgeLabel.ROAD)
    graph.add_edge(1, 2, 0.3, EdgeLabel.ROAD)
    graph.add_edge(0, 2, 0.9, EdgeLabel.ROAD)
    return graph


def test_astar_finds_cheapest_path(weighted_path):
    emulator = Emulator(weighted_path, PartitionMap.uniform(3, 1))
    cursor = emulator.cursor()
    cost = astar_search(emulator, cursor, 0, 2, 0.1 / 0.3)
    assert cost == pytest.approx(0.6)
    # goal lookup and coordinates, start lookup, then nine per edge of the
    # two expanded vertices
    assert (cursor.op_local, cursor.op_global) == (4 + 4 * 9, 0)


def test_astar_both_directions(weighted_path):
    emulator = Emulator(weighted_path, PartitionMap.uniform(3, 1))
    cost = astar_search(emulator, emulator.cursor(), 2, 0, 0.1 / 0.3)
    assert cost == pytest.approx(0.6)


def test_astar_start_is_goal(weighted_path):
    emulator = Emulator(weighted_path, PartitionMap.uniform(3, 1))
    cursor = emulator.cursor()
    assert astar_search(emulator, cursor, 1, 1, 1.0) == 0.0
    assert cursor.op_total == 4


def test_astar_unreachable():
    graph = Graph()
    for lon in (20.0, 21.0):
        graph.add_vertex(VertexKind.GIS_POINT, latitude=45.0, longitude=lon)
    emulator = Emulator(graph, PartitionMap.uniform(2, 1))
    with pytest.raises(WorkloadError):
        astar_search(emulator, emulator.cursor(), 0, 1, 1.0)


def test_astar_crossing_counts_once_per_edge(weighted_path):
    emulator = Emulator(weighted_path, PartitionMap([0, 0, 1], 2))
    record = OperationRecord(0, OperationKind.GIS_ASTAR_LONG, (0, 2))
    summary = exec_gis_op(emulator, record)
    # 0-2 from 0 and 1-2 from 1 lead to the other partition
    assert summary == TrafficSummary(4 + 4 * 8 + 2, 2)


@pytest.fixture
def fan():
    """1 follows 2, 2 follows 3 and 4, vertex 0 follows nobody"""
    graph = Graph()
    for _ in range(5):
        graph.add_vertex(VertexKind.SOCIAL_USER)
    for start, end in [(1, 2), (2, 3), (2, 4)]:
        graph.add_edge(start, end, label=EdgeLabel.FOLLOWS)
    return graph


def test_foaf_visits_two_levels(fan):
    emulator = Emulator(fan, PartitionMap.uniform(5, 1))
    cursor = emulator.cursor()
    assert foaf_search(emulator, cursor, 1) == {2, 3, 4}
    # lookup, one edge with end and id, two edges with end and id
    assert cursor.op_total == 1 + 3 + 6


def test_foaf_without_followees(fan):
    emulator = Emulator(fan, PartitionMap.uniform(5, 1))
    record = OperationRecord(0, OperationKind.SOCIAL_FOAF, (0,))
    assert exec_social_op(emulator, record) == TrafficSummary(1, 0)


def test_foaf_depth_one(fan):
    emulator = Emulator(fan, PartitionMap.uniform(5, 1))
    assert foaf_search(emulator, emulator.cursor(), 1, depth=1) == {2}


def test_walk_lengths():
    lengths = sample_walk_lengths(np.random.default_rng(1), 10_000)
    assert lengths.min() >= 0
    assert lengths.mean() == pytest.approx(11, abs=1)


@pytest.fixture(scope="module")
def gis_graph():
    return generate_gis(GisGenSpec(seed=5))


def test_gis_single_city():
    graph = generate_gis(
        GisGenSpec(num_cities=1, urban_vertices_per_city=100, rural_vertices=0)
    )
    spec = WorkloadSpec(OperationKind.GIS_ASTAR_SHORT, num_ops=100)
    for record in gen_gis_ops(graph, spec):
        assert graph.vertex(record.start).properties[CITY] == 0


def test_gis_long_same_city_share(gis_graph):
    spec = WorkloadSpec(OperationKind.GIS_ASTAR_LONG, num_ops=4000, seed=3)
    same = [
        gis_graph.vertex(record.start).properties[CITY]
        == gis_graph.vertex(record.end).properties[CITY]
        for record in gen_gis_ops(gis_graph, spec)
    ]
    assert 0.10 <= np.mean(same) <= 0.30


def test_gis_start_modes(gis_graph):
    def mean_distance(mode):
        spec = WorkloadSpec(
            OperationKind.GIS_ASTAR_LONG, 2000, 1, gis_start_mode=mode
        )
        return np.mean(
            [
                gis_graph.vertex(record.start).properties["city_distance"]
                for record in gen_gis_ops(gis_graph, spec)
            ]
        )

    near = mean_distance(GisStartMode.NEAR_CITY)
    assert near < mean_distance(GisStartMode.LITERAL)


def test_gis_needs_gis_pattern(gis_graph):
    with pytest.raises(WorkloadError):
        gen_gis_ops(gis_graph, WorkloadSpec(OperationKind.FS_BFS))


def test_gis_per_step_traffic(gis_graph):
    emulator = Emulator(gis_graph, partition_random(gis_graph, 2, 1))
    log = generate_workload(
        gis_graph, WorkloadSpec(OperationKind.GIS_ASTAR_SHORT, 50, 2)
    )
    for summary in replay(emulator, log, progress=False):
        # four setup units, then nine per edge with one of them global
        # when it leads to another partition
        assert (summary.total_traffic - 4) % 9 == 0


def gis_pct_global(graph, pattern, k, num_ops):
    emulator = Emulator(graph, partition_random(graph, k, 2))
    log = generate_workload(graph, WorkloadSpec(pattern, num_ops, 3))
    return total_traffic(replay(emulator, log, progress=False)).pct_global


@pytest.mark.parametrize("k", [2, 4])
def test_gis_short_pct_global_matches_prediction(gis_graph, k):
    pct_global = gis_pct_global(
        gis_graph, OperationKind.GIS_ASTAR_SHORT, k, 200
    )
    # one potentially global get_edges among nine actions per edge
    predicted = predicted_percentage_global(1, 8, 1 - 1 / k)
    assert pct_global == pytest.approx(predicted, rel=0.15)


@pytest.mark.slow
def test_gis_long_pct_global_matches_prediction(gis_graph):
    pct_global = gis_pct_global(gis_graph, OperationKind.GIS_ASTAR_LONG, 2, 50)
    assert pct_global == pytest.approx(0.0556, rel=0.15)


def test_invalid_spec():
    with pytest.raises(WorkloadError):
        WorkloadSpec("FS_DFS").validate()
    with pytest.raises(WorkloadError):
        WorkloadSpec(num_ops=-1).validate()


@pytest.mark.parametrize("k", [1, 2, 4])
def test_social_pct_global_matches_prediction(k):
    graph = generate_social(SocialGenSpec(seed=1, target_vertices=3000))
    emulator = Emulator(graph, partition_random(graph, k, 2))
    log = generate_workload(
        graph, WorkloadSpec(OperationKind.SOCIAL_FOAF, 300, 3)
    )
    summary = total_traffic(replay(emulator, log, progress=False))
    predicted = predicted_percentage_global(1, 2, 1 - 1 / k)
    if k == 1:
        assert summary.global_traffic == 0
    else:
        assert summary.pct_global == pytest.approx(predicted, rel=0.15)


@pytest.mark.slow
def test_fs_pct_global_matches_prediction():
    graph = generate_fs(FsGenSpec(seed=2))
    emulator = Emulator(graph, partition_random(graph, 2, 2))
    log = generate_workload(graph, WorkloadSpec(num_ops=2000, seed=3))
    summaries = replay(emulator, log, progress=False)
    predicted = predicted_percentage_global(1, 2, 0.5)
    assert total_traffic(summaries).pct_global == pytest.approx(
        predicted, rel=0.15
    )
    totals = sorted(summary.total_traffic for summary in summaries)
    assert totals[-1] >= 10 * totals[len(totals) // 2]


def test_replay_leaves_graph_alone(small_fs):
    before = small_fs.structure_hash()
    emulator = Emulator(small_fs, PartitionMap([0, 1, 0, 1], 2))
    log = generate_workload(small_fs, WorkloadSpec(num_ops=20))
    summaries = replay(emulator, log, progress=False)
    assert small_fs.structure_hash() == before
    infos = emulator.snapshot_all()
    assert sum(info.total_traffic for info in infos) == (
        total_traffic(summaries).total_traffic
    )
