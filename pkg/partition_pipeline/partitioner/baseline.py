"""random assignment and the hardcoded partitionings of known datasets"""
import logging

import numpy as np

from ..graph.core import (
    LONGITUDE,
    Direction,
    EdgeLabel,
    PartitionMap,
    VertexKind,
)
from .base import PartitionerError, PartitionMethod, Partitioner

FS_KINDS = {
    VertexKind.ORG,
    VertexKind.USER,
    VertexKind.FOLDER,
    VertexKind.FILE,
    VertexKind.EVENT,
}


def partition_random(graph, k, seed):
    """every vertex goes to a uniformly random partition"""
    if k < 1:
        raise PartitionerError(f"partition count {k} has to be >= 1")
    rng = np.random.default_rng(seed)
    return PartitionMap(rng.integers(k, size=graph.num_vertices), k)


def _majority(pids, k):
    if not pids:
        return None
    return int(np.argmax(np.bincount(pids, minlength=k)))


def _child_folders(graph, vid):
    return [
        edge.end
        for edge in graph.incident(vid, Direction.OUT, EdgeLabel.CHILD)
        if graph.vertices[edge.end].kind is VertexKind.FOLDER
    ]


def _folder_order(graph):
    """root folders and all folders in depth first order"""
    roots = []
    for user in graph.vertices_of_kind(VertexKind.USER):
        for edge in graph.incident(user, Direction.OUT, EdgeLabel.OWNS):
            roots.append(edge.end)

    order = []
    seen = set()
    stack = list(reversed(roots))
    while stack:
        vid = stack.pop()
        if vid in seen:
            continue
        seen.add(vid)
        order.append(vid)
        stack.extend(reversed(_child_folders(graph, vid)))
    return order


def _leaf_weight(graph, vid):
    """the folder, its files and the events of both"""
    weight = 1 + len(graph.incident(vid, Direction.OUT, EdgeLabel.HAS_EVENT))
    for edge in graph.incident(vid, Direction.OUT, EdgeLabel.CHILD):
        child = graph.vertices[edge.end]
        if child.kind is VertexKind.FILE:
            weight += 1 + len(
                graph.incident(child.id, Direction.OUT, EdgeLabel.HAS_EVENT)
            )
    return weight


def partition_fs_subtrees(graph, k):
    """split the folder trees of a file system graph into k subtrees

    leaf folders are taken in depth first order and cut into k contiguous
    runs of about equal weight. parent folders join the partition most of
    their child folders are on, files join their folder, events join their
    target, users join their root folder and organisations join most of
    their members.
    """
    if k < 1:
        raise PartitionerError(f"partition count {k} has to be >= 1")
    kinds = {vertex.kind for vertex in graph.vertices}
    if kinds - FS_KINDS or VertexKind.FOLDER not in kinds:
        raise PartitionerError("graph is not a file system graph")

    order = _folder_order(graph)
    folders = set(graph.vertices_of_kind(VertexKind.FOLDER))
    if set(order) != folders:
        raise PartitionerError("file system graph has folders without owner")

    assignment = np.zeros(graph.num_vertices, dtype=np.int64)
    leaves = [vid for vid in order if not _child_folders(graph, vid)]
    weights = np.array([_leaf_weight(graph, vid) for vid in leaves])
    middles = np.cumsum(weights) - weights / 2
    assignment[leaves] = np.minimum(
        (k * middles / weights.sum()).astype(np.int64), k - 1
    )

    for vid in reversed(order):
        children = _child_folders(graph, vid)
        if children:
            assignment[vid] = _majority(assignment[children].tolist(), k)

    for vid in graph.vertices_of_kind(VertexKind.FILE):
        parents = graph.incident(vid, Direction.IN, EdgeLabel.CHILD)
        if parents:
            assignment[vid] = assignment[parents[0].start]

    for vid in graph.vertices_of_kind(VertexKind.EVENT):
        targets = graph.incident(vid, Direction.OUT, EdgeLabel.TARGET)
        if targets:
            assignment[vid] = assignment[targets[0].end]

    for vid in graph.vertices_of_kind(VertexKind.USER):
        roots = graph.incident(vid, Direction.OUT, EdgeLabel.OWNS)
        if roots:
            assignment[vid] = assignment[roots[0].end]

    for vid in graph.vertices_of_kind(VertexKind.ORG):
        members = graph.incident(vid, Direction.IN, EdgeLabel.MEMBER_OF)
        pid = _majority([int(assignment[e.start]) for e in members], k)
        assignment[vid] = 0 if pid is None else pid

    logging.debug(f"split {len(leaves)} leaf folders into {k} subtrees")
    return PartitionMap(assignment, k)


def partition_gis_longitude(graph, k):
    """equal count longitude bands, ties in longitude go by vertex id"""
    if k < 1:
        raise PartitionerError(f"partition count {k} has to be >= 1")
    longitudes = np.empty(graph.num_vertices)
    for vertex in graph.vertices:
        try:
            longitudes[vertex.id] = vertex.properties[LONGITUDE]
        except KeyError:
            raise PartitionerError(
                f"vertex {vertex.id} has no longitude"
            ) from None

    n = graph.num_vertices
    order = np.lexsort((np.arange(n), longitudes))
    assignment = np.empty(n, dtype=np.int64)
    assignment[order] = np.arange(n) * k // max(n, 1)
    return PartitionMap(assignment, k)


class RandomPartitioner(Partitioner):
    method = PartitionMethod.RANDOM

    def partition(self, graph):  # override
        return partition_random(graph, self.k, self.seed)


class FsSubtreePartitioner(Partitioner):
    method = PartitionMethod.HARDCODED_FS

    def partition(self, graph):  # override
        return partition_fs_subtrees(graph, self.k)


class GisLongitudePartitioner(Partitioner):
    method = PartitionMethod.HARDCODED_GIS_LON

    def partition(self, graph):  # override
        return partition_gis_longitude(graph, self.k)
