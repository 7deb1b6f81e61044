"""read operation generators, executors and log replay

every pattern has a factory that generates a seeded operation log for a graph
and executes single records on an emulator. executors only read through the
emulator access actions, so every step of a traversal is charged like the
action tables of the patterns:

    file system bfs:    get_id, get_edges, get_end_vertex
    gis a*:             get_id twice, latitude, longitude, get_edges,
                        edge get_id, weight, get_start_vertex, get_end_vertex
    followees of followees: get_id, get_edges, get_end_vertex

get_edges is the only action that can become global.
"""
import abc
import collections
import dataclasses
import enum
import heapq
import logging

import numpy as np
from tqdm import tqdm

from ..datasets.gis import CITY_DISTANCE, max_speed
from ..graph.core import (
    LATITUDE,
    LONGITUDE,
    Direction,
    EdgeLabel,
    VertexKind,
    undirected_view,
)
from .emulator import WEIGHT
from .logs import SEED, OperationKind, OperationLog, OperationRecord

DEFAULT_NUM_OPS = 2000
WALK_MEAN = 11.0
FOAF_DEPTH = 2


class WorkloadError(RuntimeError):
    """a workload cannot be generated or executed on a graph"""


class GisStartMode(str, enum.Enum):
    """how gis operations pick their start vertex

    NEAR_CITY: weight 1 / (1 + distance to the nearest city center)
    LITERAL: weight proportional to the distance to the nearest city center
    """

    NEAR_CITY = "NEAR_CITY"
    LITERAL = "LITERAL"


@dataclasses.dataclass
class WorkloadSpec:
    """which operations to generate and how many

    walk_mean: mean length of the random walk to the end of a short gis
        operation
    foaf_depth: traversal steps of a followee search
    """

    pattern: OperationKind = OperationKind.FS_BFS
    num_ops: int = DEFAULT_NUM_OPS
    seed: int = 0
    gis_start_mode: GisStartMode = GisStartMode.NEAR_CITY
    walk_mean: float = WALK_MEAN
    foaf_depth: int = FOAF_DEPTH

    def validate(self):
        try:
            self.pattern = OperationKind(self.pattern)
            self.gis_start_mode = GisStartMode(self.gis_start_mode)
        except ValueError as exc:
            raise WorkloadError(str(exc)) from None
        if self.num_ops < 0:
            raise WorkloadError("num_ops has to be >= 0")
        if self.walk_mean < 0:
            raise WorkloadError("walk_mean has to be >= 0")
        if self.foaf_depth < 1:
            raise WorkloadError("foaf_depth has to be >= 1")
        return self


@dataclasses.dataclass
class TrafficSummary:
    """traffic of one operation or a whole replay"""

    local_traffic: int = 0
    global_traffic: int = 0

    @property
    def total_traffic(self):
        return self.local_traffic + self.global_traffic

    @property
    def pct_global(self):
        if not self.total_traffic:
            return 0.0
        return self.global_traffic / self.total_traffic

    @classmethod
    def of(cls, cursor):
        return cls(cursor.op_local, cursor.op_global)

    def __add__(self, other):
        return TrafficSummary(
            self.local_traffic + other.local_traffic,
            self.global_traffic + other.global_traffic,
        )


def _weighted_choice(rng, vertices, weights, size):
    weights = np.asarray(weights, dtype=np.float64)
    if not len(vertices) or weights.sum() <= 0:
        raise WorkloadError("no vertex can be sampled")
    picks = rng.choice(len(vertices), size=size, p=weights / weights.sum())
    return np.asarray(vertices)[picks]


def _new_log(spec):
    header = {SEED: str(spec.seed), "pattern": spec.pattern.value}
    return OperationLog(header=header)


def sample_walk_lengths(rng, size, mean=WALK_MEAN):
    """exponentially distributed walk lengths rounded to whole steps"""
    return np.rint(rng.exponential(mean, size)).astype(np.int64)


def fs_parent(graph, vid):
    """folder holding vid, None for root folders"""
    for edge in graph.incident(vid, Direction.IN, EdgeLabel.CHILD):
        return edge.start
    return None


def gen_fs_ops(graph, spec):
    """bfs operations from an ancestor folder down to a file or folder

    end vertices are sampled proportional to their degree, the start is a
    uniformly chosen level on the path from the end up to its root folder
    """
    spec.validate()
    candidates = graph.vertices_of_kind(VertexKind.FOLDER, VertexKind.FILE)
    if not candidates:
        raise WorkloadError(f"{graph} has no folders or files")
    rng = np.random.default_rng(spec.seed)
    view = undirected_view(graph)
    ends = _weighted_choice(
        rng, candidates, view.degree_count[candidates], spec.num_ops
    )

    chains = {}
    log = _new_log(spec)
    for seq, end in enumerate(ends.tolist()):
        if end not in chains:
            chain = [end]
            parent = fs_parent(graph, end)
            while parent is not None:
                chain.append(parent)
                parent = fs_parent(graph, parent)
            chains[end] = chain
        chain = chains[end]
        start = chain[int(rng.integers(len(chain)))]
        log.records.append(OperationRecord(seq, spec.pattern, (start, end)))
    return log


def gen_gis_ops(graph, spec):
    """shortest path operations between gis points

    starts are weighted by the distance to the nearest city per
    spec.gis_start_mode. a short operation ends where a random walk of
    exponential length from the start ends, a long one at a vertex sampled
    like the start
    """
    spec.validate()
    if spec.pattern not in (
        OperationKind.GIS_ASTAR_SHORT,
        OperationKind.GIS_ASTAR_LONG,
    ):
        raise WorkloadError(f"{spec.pattern.value} is no gis pattern")
    points = graph.vertices_of_kind(VertexKind.GIS_POINT)
    try:
        distance = np.array(
            [graph.vertex(vid).properties[CITY_DISTANCE] for vid in points]
        )
    except KeyError:
        raise WorkloadError(
            f"gis points of {graph} need a {CITY_DISTANCE!r} property"
        ) from None

    if spec.gis_start_mode is GisStartMode.NEAR_CITY:
        weights = 1.0 / (1.0 + distance)
    else:
        weights = distance if distance.sum() > 0 else np.ones(len(points))

    rng = np.random.default_rng(spec.seed)
    starts = _weighted_choice(rng, points, weights, spec.num_ops)
    if spec.pattern is OperationKind.GIS_ASTAR_SHORT:
        view = undirected_view(graph)
        lengths = sample_walk_lengths(rng, spec.num_ops, spec.walk_mean)
        ends = []
        for start, length in zip(starts.tolist(), lengths.tolist()):
            vid = start
            for _ in range(length):
                neighbors = view.neighbors(vid)
                if not neighbors.size:
                    break
                vid = int(neighbors[rng.integers(neighbors.size)])
            ends.append(vid)
    else:
        ends = _weighted_choice(rng, points, weights, spec.num_ops).tolist()

    log = _new_log(spec)
    for seq, (start, end) in enumerate(zip(starts.tolist(), ends)):
        log.records.append(OperationRecord(seq, spec.pattern, (start, end)))
    return log


def gen_social_ops(graph, spec):
    """followee searches starting at users sampled by out-degree"""
    spec.validate()
    out = [graph.out_degree_count(vid) for vid in range(graph.num_vertices)]
    rng = np.random.default_rng(spec.seed)
    starts = _weighted_choice(
        rng, range(graph.num_vertices), out, spec.num_ops
    )
    log = _new_log(spec)
    for seq, start in enumerate(starts.tolist()):
        log.records.append(OperationRecord(seq, spec.pattern, (start,)))
    return log


def bfs_search(emulator, cursor, start, end):
    """breadth first search down folder and file children

    returns the number of vertices reached
    """
    emulator.lookup_vertex(cursor, start)
    if start == end:
        return 1
    queue = collections.deque([start])
    reached = {start}
    while queue:
        vid = queue.popleft()
        emulator.relocate(cursor, vid)
        for edge in emulator.get_edges(
            cursor, vid, Direction.OUT, EdgeLabel.CHILD
        ):
            emulator.relocate(cursor, vid)
            child = emulator.get_end_vertex(cursor, edge)
            if emulator.get_id(cursor, child) == end:
                return len(reached) + 1
            if child.id not in reached:
                reached.add(child.id)
                queue.append(child.id)
    raise WorkloadError(f"{end} cannot be reached from {start}")


def exec_fs_op(emulator, record):
    cursor = emulator.cursor()
    bfs_search(emulator, cursor, record.start, record.end)
    return TrafficSummary.of(cursor)


def astar_search(emulator, cursor, start, goal, speed):
    """cheapest path weight from start to goal, roads in both directions

    speed: largest length to weight ratio of the graph, the heuristic is
        the straight line distance divided by it
    """
    target = emulator.lookup_vertex(cursor, goal)
    goal_xy = np.array(
        [
            emulator.get_property(cursor, target, LONGITUDE),
            emulator.get_property(cursor, target, LATITUDE),
        ]
    )
    emulator.lookup_vertex(cursor, start)
    if start == goal:
        return 0.0

    cost = {start: 0.0}
    done = set()
    queue = [(0.0, 0.0, start)]
    while queue:
        _, g, vid = heapq.heappop(queue)
        if vid == goal:
            return g
        if vid in done:
            continue
        done.add(vid)
        emulator.relocate(cursor, vid)
        vertex = emulator.graph.vertex(vid)
        for edge in emulator.get_edges(cursor, vid, Direction.BOTH):
            emulator.relocate(cursor, vid)
            emulator.get_id(cursor, vertex)
            emulator.get_id(cursor, target)
            emulator.get_id(cursor, edge)
            weight = emulator.get_property(cursor, edge, WEIGHT)
            tail = emulator.get_start_vertex(cursor, edge)
            head = emulator.get_end_vertex(cursor, edge)
            other = head if tail.id == vid else tail
            xy = np.array(
                [
                    emulator.get_property(cursor, other, LONGITUDE),
                    emulator.get_property(cursor, other, LATITUDE),
                ]
            )
            if other.id in done:
                continue
            candidate = g + weight
            if candidate < cost.get(other.id, np.inf):
                cost[other.id] = candidate
                estimate = float(np.hypot(*(xy - goal_xy))) / speed
                heapq.heappush(
                    queue, (candidate + estimate, candidate, other.id)
                )
    raise WorkloadError(f"{goal} cannot be reached from {start}")


def exec_gis_op(emulator, record, speed=None):
    """a* search of record, speed is computed from the graph when None"""
    if speed is None:
        speed = max_speed(emulator.graph)
    cursor = emulator.cursor()
    astar_search(emulator, cursor, record.start, record.end, speed)
    return TrafficSummary.of(cursor)


def foaf_search(emulator, cursor, start, depth=FOAF_DEPTH):
    """users reachable over at most depth followed edges, start excluded"""
    emulator.lookup_vertex(cursor, start)
    frontier = [start]
    reached = set()
    expanded = {start}
    for _ in range(depth):
        found = []
        for vid in frontier:
            emulator.relocate(cursor, vid)
            for edge in emulator.get_edges(
                cursor, vid, Direction.OUT, EdgeLabel.FOLLOWS
            ):
                emulator.relocate(cursor, vid)
                vertex = emulator.get_end_vertex(cursor, edge)
                followee = emulator.get_id(cursor, vertex)
                if followee != start:
                    reached.add(followee)
                if followee not in expanded:
                    expanded.add(followee)
                    found.append(followee)
        frontier = found
    return reached


def exec_social_op(emulator, record, depth=FOAF_DEPTH):
    cursor = emulator.cursor()
    foaf_search(emulator, cursor, record.start, depth)
    return TrafficSummary.of(cursor)


class OperationFactory(abc.ABC):
    """generates and executes the operations of one pattern"""

    patterns = ()

    @abc.abstractmethod
    def generate(self, graph, spec):
        """operation log for graph following spec"""

    @abc.abstractmethod
    def execute(self, emulator, record):
        """run record on emulator, returns its TrafficSummary"""


class FsBfsFactory(OperationFactory):
    patterns = (OperationKind.FS_BFS,)

    def generate(self, graph, spec):  # override
        return gen_fs_ops(graph, spec)

    def execute(self, emulator, record):  # override
        return exec_fs_op(emulator, record)


class GisAstarFactory(OperationFactory):
    """keeps the heuristic speed of the last graph it executed on"""

    patterns = (OperationKind.GIS_ASTAR_SHORT, OperationKind.GIS_ASTAR_LONG)

    def __init__(self):
        self._graph = None
        self._speed = None

    def generate(self, graph, spec):  # override
        return gen_gis_ops(graph, spec)

    def execute(self, emulator, record):  # override
        if emulator.graph is not self._graph:
            self._graph = emulator.graph
            self._speed = max_speed(emulator.graph)
        return exec_gis_op(emulator, record, self._speed)


class SocialFoafFactory(OperationFactory):
    patterns = (OperationKind.SOCIAL_FOAF,)

    def __init__(self, depth=FOAF_DEPTH):
        self.depth = depth

    def generate(self, graph, spec):  # override
        return gen_social_ops(graph, spec)

    def execute(self, emulator, record):  # override
        return exec_social_op(emulator, record, self.depth)


def factory_for(pattern, foaf_depth=FOAF_DEPTH):
    match OperationKind(pattern):
        case OperationKind.FS_BFS:
            return FsBfsFactory()
        case OperationKind.GIS_ASTAR_SHORT | OperationKind.GIS_ASTAR_LONG:
            return GisAstarFactory()
        case OperationKind.SOCIAL_FOAF:
            return SocialFoafFactory(foaf_depth)


def generate_workload(graph, spec):
    """operation log of spec.num_ops operations of spec.pattern"""
    spec.validate()
    log = factory_for(spec.pattern, spec.foaf_depth).generate(graph, spec)
    logging.info(f"generated {len(log)} {spec.pattern.value} operations")
    return log


def replay(emulator, log, foaf_depth=FOAF_DEPTH, progress=True):
    """execute every record of log in order

    returns the TrafficSummary of every operation
    """
    factories = {}
    summaries = []
    for record in tqdm(
        log, desc="replaying", unit="op", disable=not progress or not len(log)
    ):
        if record.kind not in factories:
            factories[record.kind] = factory_for(record.kind, foaf_depth)
        summaries.append(factories[record.kind].execute(emulator, record))
    return summaries


def total_traffic(summaries):
    return sum(summaries, TrafficSummary())
