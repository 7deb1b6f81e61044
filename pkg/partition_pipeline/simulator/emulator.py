"""logically partitioned graph database with traffic accounting

partitions are only labels on the vertices of one in-memory graph, edges
reside on the partition of their start vertex. every access action of a
traversal costs one unit of traffic. an access is local when it stays on the
partition the traversal is on and global when it has to reach another
partition, which only happens when get_edges returns an edge leading to a
vertex on another partition. global traffic is charged to the partition that
issued the request.
"""
import dataclasses

import numpy as np

from ..graph.core import (
    Direction,
    Edge,
    GraphError,
    PartitionMapError,
    Vertex,
)

WEIGHT = "weight"  # property key of edge weights


@dataclasses.dataclass
class InstanceInfo:
    """counters of one partition"""

    pid: int
    num_vertices: int = 0
    num_edges: int = 0
    local_traffic: int = 0
    global_traffic: int = 0

    @property
    def total_traffic(self):
        return self.local_traffic + self.global_traffic


class Cursor:
    """position of one operation and the traffic it caused so far

    current_partition: partition the traversal is on
    """

    def __init__(self, current_partition=0):
        self.current_partition = current_partition
        self.op_local = 0
        self.op_global = 0

    def __repr__(self):
        args = self.current_partition, self.op_local, self.op_global
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    @property
    def op_total(self):
        return self.op_local + self.op_global


class Emulator:
    """partitioned view of graph with per partition counters

    the graph is never changed, moves only change the partition map
    partition_map: copied, total over the vertices of graph
    """

    def __init__(self, graph, partition_map):
        partition_map.check_total(graph)
        self.graph = graph
        self.partition_map = partition_map.copy()
        self._out_counts = np.array(
            [graph.out_degree_count(vid) for vid in range(graph.num_vertices)],
            dtype=np.int64,
        )
        self._count_residents()
        self._local = np.zeros(self.k, dtype=np.int64)
        self._global = np.zeros(self.k, dtype=np.int64)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.graph!r}, k={self.k})"

    @property
    def k(self):
        return self.partition_map.k

    def _count_residents(self):
        assignment = self.partition_map.assignment
        self._vertices = np.bincount(assignment, minlength=self.k)
        self._edges = np.bincount(
            assignment, weights=self._out_counts, minlength=self.k
        ).astype(np.int64)

    def _check_pid(self, pid):
        if not 0 <= pid < self.k:
            raise PartitionMapError(f"unknown partition {pid} of {self.k}")

    def _local_unit(self, cursor, pid=None):
        pid = cursor.current_partition if pid is None else pid
        self._local[pid] += 1
        cursor.op_local += 1

    def _global_unit(self, cursor):
        self._global[cursor.current_partition] += 1
        cursor.op_global += 1

    def partition_of(self, vid):
        self.graph.vertex(vid)
        return self.partition_map[vid]

    def cursor(self, vid=None):
        """new cursor on the partition of vid, partition 0 without vid"""
        return Cursor(0 if vid is None else self.partition_of(vid))

    def relocate(self, cursor, vid):
        """continue a traversal at an already reached vertex, free"""
        cursor.current_partition = self.partition_of(vid)

    def lookup_vertex(self, cursor, vid):
        """index lookup, moves the cursor to the partition of vid"""
        pid = self.partition_of(vid)
        cursor.current_partition = pid
        self._local_unit(cursor, pid)
        return self.graph.vertex(vid)

    def get_id(self, cursor, entity):
        self._local_unit(cursor)
        return entity.id

    def get_edges(self, cursor, vid, direction=Direction.OUT, label=None):
        """edges of vid, one unit per edge

        an edge to a vertex on another partition than the cursor costs a
        global unit, any other edge a local one
        """
        edges = self.graph.incident(vid, direction, label)
        for edge in edges:
            far = edge.other(vid)
            if self.partition_map[far] != cursor.current_partition:
                self._global_unit(cursor)
            else:
                self._local_unit(cursor)
        return edges

    def get_start_vertex(self, cursor, edge):
        self._local_unit(cursor)
        return self.graph.vertex(edge.start)

    def get_end_vertex(self, cursor, edge):
        """end vertex of edge, moves the cursor to its partition"""
        self._local_unit(cursor)
        vertex = self.graph.vertex(edge.end)
        cursor.current_partition = self.partition_map[edge.end]
        return vertex

    def get_property(self, cursor, entity, key):
        """property key of a vertex or edge, WEIGHT is the edge weight"""
        if isinstance(entity, Edge) and key == WEIGHT:
            value = entity.weight
        elif isinstance(entity, (Vertex, Edge)) and key in entity.properties:
            value = entity.properties[key]
        else:
            raise GraphError(f"{entity!r} has no property {key!r}")
        self._local_unit(cursor)
        return value

    def move_vertices(self, vertices, target):
        """move vertices to partition target, their out edges follow"""
        self._check_pid(target)
        vertices = np.unique(np.asarray(vertices, dtype=np.int64))
        if vertices.size and (
            vertices[0] < 0 or vertices[-1] >= self.graph.num_vertices
        ):
            raise GraphError(f"unknown vertices in {vertices.tolist()}")

        sources = self.partition_map.assignment[vertices]
        np.subtract.at(self._vertices, sources, 1)
        np.subtract.at(self._edges, sources, self._out_counts[vertices])
        self._vertices[target] += vertices.size
        self._edges[target] += self._out_counts[vertices].sum()
        self.partition_map.assignment[vertices] = target

    def set_partition_map(self, partition_map):
        """replace the whole partitioning, traffic counters are kept"""
        partition_map.check_total(self.graph)
        if partition_map.k != self.k:
            raise PartitionMapError(
                f"partition map has {partition_map.k} partitions, not {self.k}"
            )
        self.partition_map = partition_map.copy()
        self._count_residents()

    def instance_info(self, pid):
        self._check_pid(pid)
        return InstanceInfo(
            pid,
            int(self._vertices[pid]),
            int(self._edges[pid]),
            int(self._local[pid]),
            int(self._global[pid]),
        )

    def snapshot_all(self):
        return [self.instance_info(pid) for pid in range(self.k)]

    def reset_traffic(self):
        self._local[:] = 0
        self._global[:] = 0

    def clone(self):
        """independent emulator on the same graph with copied counters"""
        other = Emulator(self.graph, self.partition_map)
        other._local = self._local.copy()
        other._global = self._global.copy()
        return other
