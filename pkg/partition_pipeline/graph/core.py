"""in-memory directed weighted multigraph with partition assignments

vertices and edges get dense integer ids in insertion order, so per-vertex
data (partitions, load vectors) can live in plain numpy arrays.
metrics and diffusion use the undirected view, see undirected_view.
"""
import enum
import hashlib
import logging

import numpy as np
import scipy.sparse

MAX_WEIGHT = 1.0


class GraphError(KeyError):
    """a vertex or edge id does not exist in the graph"""


class PartitionMapError(ValueError):
    """a partition map is not total over the vertices or out of range"""


class VertexKind(str, enum.Enum):
    """domain tag of a vertex"""

    GENERIC = "GENERIC"
    ORG = "ORG"
    USER = "USER"
    FOLDER = "FOLDER"
    FILE = "FILE"
    EVENT = "EVENT"
    GIS_POINT = "GIS_POINT"
    SOCIAL_USER = "SOCIAL_USER"


class EdgeLabel(str, enum.Enum):
    """relationship type of an edge"""

    LINK = "LINK"
    MEMBER_OF = "MEMBER_OF"
    OWNS = "OWNS"
    CHILD = "CHILD"
    HAS_EVENT = "HAS_EVENT"
    ACTOR = "ACTOR"
    TARGET = "TARGET"
    ROAD = "ROAD"
    FOLLOWS = "FOLLOWS"


class Direction(str, enum.Enum):
    """which incident edges of a vertex to consider"""

    IN = "IN"
    OUT = "OUT"
    BOTH = "BOTH"


LATITUDE = "latitude"
LONGITUDE = "longitude"


class Vertex:
    """a vertex with a kind and scalar properties

    GIS_POINT vertices always carry latitude and longitude
    """

    def __init__(self, vid, kind=VertexKind.GENERIC, properties=None):
        self.id = vid
        self.kind = VertexKind(kind)
        self.properties = dict(properties) if properties else {}
        if self.kind is VertexKind.GIS_POINT:
            missing = {LATITUDE, LONGITUDE} - self.properties.keys()
            if missing:
                raise ValueError(
                    f"gis vertex {vid} misses coordinates: {sorted(missing)}"
                )

    def __repr__(self):
        args = self.id, self.kind.value, self.properties
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    def __eq__(self, other):
        if not isinstance(other, Vertex):
            return NotImplemented
        return (self.id, self.kind, self.properties) == (
            other.id,
            other.kind,
            other.properties,
        )


class Edge:
    """a directed edge, resides on the partition of its start vertex

    weight: in (0, 1], 1.0 when the source carries none
    """

    def __init__(
        self,
        eid,
        start,
        end,
        weight=1.0,
        label=EdgeLabel.LINK,
        properties=None,
    ):
        if not 0.0 < weight <= MAX_WEIGHT:
            raise ValueError(f"edge weight {weight} outside (0, 1]")

        self.id = eid
        self.start = start
        self.end = end
        self.weight = float(weight)
        self.label = EdgeLabel(label)
        self.properties = dict(properties) if properties else {}

    def __repr__(self):
        args = (
            self.id,
            self.start,
            self.end,
            self.weight,
            self.label.value,
            self.properties,
        )
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    def __eq__(self, other):
        if not isinstance(other, Edge):
            return NotImplemented
        return (
            self.id,
            self.start,
            self.end,
            self.weight,
            self.label,
            self.properties,
        ) == (
            other.id,
            other.start,
            other.end,
            other.weight,
            other.label,
            other.properties,
        )

    def other(self, vid):
        """the endpoint that is not vid"""
        return self.end if self.start == vid else self.start


class Graph:
    """directed weighted multigraph with out and in adjacency indices

    every edge appears once in the out list of its start vertex and once in
    the in list of its end vertex
    """

    def __init__(self):
        self.vertices = []
        self.edges = []
        self._out = []
        self._in = []
        self._view = None

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(vertices={self.num_vertices}, "
            f"edges={self.num_edges})"
        )

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    def add_vertex(self, kind=VertexKind.GENERIC, **properties):
        """add a vertex and return its id"""
        vid = len(self.vertices)
        self.vertices.append(Vertex(vid, kind, properties))
        self._out.append([])
        self._in.append([])
        self._view = None
        return vid

    def add_edge(self, start, end, weight=1.0, label=EdgeLabel.LINK, **props):
        """add a directed edge from start to end and return its id"""
        self.vertex(start)
        self.vertex(end)
        eid = len(self.edges)
        self.edges.append(Edge(eid, start, end, weight, label, props))
        self._out[start].append(eid)
        self._in[end].append(eid)
        self._view = None
        return eid

    def vertex(self, vid):
        if not 0 <= vid < len(self.vertices):
            raise GraphError(f"unknown vertex {vid}")
        return self.vertices[vid]

    def edge(self, eid):
        if not 0 <= eid < len(self.edges):
            raise GraphError(f"unknown edge {eid}")
        return self.edges[eid]

    def edge_ids(self, vid, direction=Direction.OUT):
        """ids of the edges incident to vid, out edges before in edges"""
        self.vertex(vid)
        direction = Direction(direction)
        if direction is Direction.OUT:
            return list(self._out[vid])
        if direction is Direction.IN:
            return list(self._in[vid])
        return self._out[vid] + self._in[vid]

    def incident(self, vid, direction=Direction.OUT, label=None):
        """edges incident to vid, optionally only those with label"""
        edges = [self.edges[eid] for eid in self.edge_ids(vid, direction)]
        if label is None:
            return edges
        label = EdgeLabel(label)
        return [edge for edge in edges if edge.label is label]

    def out_degree_count(self, vid):
        return len(self._out[vid])

    def vertices_of_kind(self, *kinds):
        kinds = {VertexKind(kind) for kind in kinds}
        return [vertex.id for vertex in self.vertices if vertex.kind in kinds]

    def structure_hash(self):
        """hash of the vertex and edge structure, ignores partitions"""
        digest = hashlib.sha256()
        digest.update(f"{self.num_vertices}:{self.num_edges}".encode())
        for vertex in self.vertices:
            digest.update(f"v{vertex.id}{vertex.kind.value}".encode())
        for edge in self.edges:
            digest.update(
                f"e{edge.id}:{edge.start}:{edge.end}:{edge.weight!r}:"
                f"{edge.label.value}".encode()
            )
        return digest.hexdigest()


def degree(graph, vid, view=Direction.BOTH):
    """sum of the weights of edges incident to vid

    BOTH is the sum of IN and OUT
    """
    return sum(edge.weight for edge in graph.incident(vid, view))


class PartitionMap:
    """total assignment of vertices to partition ids in [0, k)

    assignment: integer array indexed by vertex id
    k: partition count
    """

    def __init__(self, assignment, k):
        assignment = np.array(assignment, dtype=np.int64)
        if assignment.ndim != 1:
            raise PartitionMapError("assignment has to be one dimensional")
        if k < 1:
            raise PartitionMapError(f"partition count {k} has to be >= 1")
        if assignment.size and (
            assignment.min() < 0 or assignment.max() >= k
        ):
            raise PartitionMapError(f"partition ids outside [0, {k})")

        self.assignment = assignment
        self.k = int(k)

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(vertices={len(self)}, k={self.k})"
        )

    def __len__(self):
        return self.assignment.size

    def __getitem__(self, vid):
        return int(self.assignment[vid])

    def __eq__(self, other):
        if not isinstance(other, PartitionMap):
            return NotImplemented
        return self.k == other.k and np.array_equal(
            self.assignment, other.assignment
        )

    @classmethod
    def uniform(cls, num_vertices, k, pid=0):
        return cls(np.full(num_vertices, pid, dtype=np.int64), k)

    def assign(self, vid, pid):
        if not 0 <= pid < self.k:
            raise PartitionMapError(f"partition {pid} outside [0, {self.k})")
        self.assignment[vid] = pid

    def copy(self):
        return PartitionMap(self.assignment.copy(), self.k)

    def sizes(self):
        """number of vertices in every partition"""
        return np.bincount(self.assignment, minlength=self.k)

    def members(self, pid):
        return np.flatnonzero(self.assignment == pid)

    def relabel(self, mapping):
        """return a map where partition i is called mapping[i]"""
        mapping = np.asarray(mapping, dtype=np.int64)
        return PartitionMap(mapping[self.assignment], self.k)

    def check_total(self, graph):
        if len(self) != graph.num_vertices:
            raise PartitionMapError(
                f"partition map covers {len(self)} vertices, graph has "
                f"{graph.num_vertices}"
            )


def is_inter_edge(graph, partition_map, eid):
    """true if the endpoints of edge eid are on different partitions"""
    edge = graph.edge(eid)
    partition_map.check_total(graph)
    return partition_map[edge.start] != partition_map[edge.end]


class UndirectedView:
    """symmetric weighted view of a graph, one entry per unordered pair

    parallel edges and reverse edges merge by summing their weights, the sum
    is clamped to 1.0 so diffusion step sizes stay bounded, self loops are
    left out

    src, dst: endpoints of every pair, src < dst
    weight: merged weight of every pair
    adjacency: symmetric scipy csr matrix of the pair weights
    """

    def __init__(self, num_vertices, src, dst, weight):
        self.num_vertices = num_vertices
        self.src = src
        self.dst = dst
        self.weight = weight
        adjacency = scipy.sparse.coo_matrix(
            (weight, (src, dst)), shape=(num_vertices, num_vertices)
        )
        self.adjacency = (adjacency + adjacency.T).tocsr()
        self.adjacency.sort_indices()
        self.degree = np.asarray(self.adjacency.sum(axis=1)).ravel()
        self.degree_count = np.diff(self.adjacency.indptr)

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(vertices={self.num_vertices}, "
            f"pairs={self.num_pairs})"
        )

    @property
    def num_pairs(self):
        return self.src.size

    @property
    def total_weight(self):
        return float(self.weight.sum())

    def neighbors(self, vid):
        start, stop = self.adjacency.indptr[vid : vid + 2]
        return self.adjacency.indices[start:stop]

    def pair_weight(self, u, v):
        return float(self.adjacency[u, v])


def undirected_view(graph):
    """undirected weighted view used by metrics and diffusion

    the view is cached on the graph until the graph changes
    """
    if graph._view is not None:
        return graph._view

    n = graph.num_vertices
    starts = np.fromiter((e.start for e in graph.edges), np.int64)
    ends = np.fromiter((e.end for e in graph.edges), np.int64)
    weights = np.fromiter((e.weight for e in graph.edges), np.float64)
    proper = starts != ends
    if not proper.all():
        logging.debug(f"undirected view drops {np.sum(~proper)} self loops")
    starts, ends, weights = starts[proper], ends[proper], weights[proper]
    low = np.minimum(starts, ends)
    high = np.maximum(starts, ends)
    keys, inverse = np.unique(low * max(n, 1) + high, return_inverse=True)
    merged = np.bincount(inverse, weights=weights, minlength=keys.size)
    merged = np.minimum(merged, MAX_WEIGHT)
    src = keys // max(n, 1)
    dst = keys % max(n, 1)
    graph._view = UndirectedView(n, src, dst, merged)
    return graph._view
