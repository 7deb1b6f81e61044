"""read and write graphs in chaco and gml format and partition map files

chaco lists every undirected edge in the lines of both endpoints, the reader
keeps the occurrence on the line of the lower vertex and stores it as a
directed edge from the lower to the higher id.
gml documents are parsed and generated with networkx.
"""
import logging

import networkx as nx
import numpy as np

from .core import EdgeLabel, Graph, PartitionMap, VertexKind, undirected_view

CHACO_COMMENT = "%"
GML_KIND = "kind"
GML_PARTITION = "partition"
GML_WEIGHT = "weight"
GML_RELATION = "relation"
GML_EDGE_ID = "eid"
# attributes networkx uses itself when writing gml
GML_RESERVED = {"id", "label", "key", "source", "target"}


class GraphFormatError(ValueError):
    """a graph, partition map or log file could not be parsed

    line: 1-based line number of the problem, None when not line bound
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ChacoHeader:
    """first line of a chaco file

    fmt: three digit flag, hundreds for vertex sizes, tens for vertex
        weights and ones for edge weights
    """

    def __init__(self, num_vertices, num_edges, fmt="000", ncon=1):
        self.num_vertices = num_vertices
        self.num_edges = num_edges
        self.fmt = fmt
        self.ncon = ncon

    def __repr__(self):
        args = self.num_vertices, self.num_edges, self.fmt, self.ncon
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    @property
    def has_vertex_sizes(self):
        return self.fmt[0] == "1"

    @property
    def has_vertex_weights(self):
        return self.fmt[1] == "1"

    @property
    def has_edge_weights(self):
        return self.fmt[2] == "1"

    @classmethod
    def parse(cls, line, lineno):
        parts = line.split()
        if not 2 <= len(parts) <= 4:
            raise GraphFormatError(f"malformed chaco header {line!r}", lineno)
        try:
            num_vertices, num_edges = int(parts[0]), int(parts[1])
            ncon = int(parts[3]) if len(parts) == 4 else 1
        except ValueError:
            raise GraphFormatError(
                f"non-numeric chaco header {line!r}", lineno
            ) from None

        fmt = parts[2].zfill(3) if len(parts) >= 3 else "000"
        if len(fmt) != 3 or set(fmt) - {"0", "1"}:
            raise GraphFormatError(f"unknown chaco fmt {parts[2]!r}", lineno)
        if num_vertices < 0 or num_edges < 0:
            raise GraphFormatError("negative counts in chaco header", lineno)
        return cls(num_vertices, num_edges, fmt, ncon)

    def format(self):
        return f"{self.num_vertices} {self.num_edges} {self.fmt}"


def _numbers(line, lineno, convert):
    try:
        return [convert(token) for token in line.split()]
    except ValueError:
        raise GraphFormatError(
            f"non-numeric token in {line.strip()!r}", lineno
        ) from None


def read_chaco(source):
    """load a graph from a chaco text stream

    source: text stream or iterable of lines
    returns a Graph with 0-indexed vertices and one edge per undirected pair
    raises GraphFormatError with the line number on malformed input
    """
    lines = (
        (lineno, line.rstrip("\n"))
        for lineno, line in enumerate(source, start=1)
        if not line.startswith(CHACO_COMMENT)
    )
    try:
        lineno, first = next(lines)
    except StopIteration:
        raise GraphFormatError("empty chaco file", 1) from None

    header = ChacoHeader.parse(first, lineno)
    graph = Graph()
    for _ in range(header.num_vertices):
        graph.add_vertex()

    skip = int(header.has_vertex_sizes)
    if header.has_vertex_weights:
        skip += header.ncon

    stride = 2 if header.has_edge_weights else 1
    lower, upper = 0, 0
    vid = -1
    for vid, (lineno, line) in zip(range(header.num_vertices), lines):
        numbers = _numbers(line, lineno, float)[skip:]
        if len(numbers) % stride:
            raise GraphFormatError("edge weight without neighbor", lineno)

        for i in range(0, len(numbers), stride):
            neighbor = numbers[i]
            if neighbor != int(neighbor):
                raise GraphFormatError(
                    f"neighbor index {neighbor} is not an integer", lineno
                )
            neighbor = int(neighbor) - 1
            if not 0 <= neighbor < header.num_vertices:
                raise GraphFormatError(
                    f"dangling neighbor index {neighbor + 1}", lineno
                )
            if neighbor == vid:
                raise GraphFormatError("self loop in chaco file", lineno)
            if neighbor < vid:
                upper += 1
                continue

            lower += 1
            weight = numbers[i + 1] if header.has_edge_weights else 1.0
            try:
                graph.add_edge(vid, neighbor, weight)
            except ValueError as exc:
                raise GraphFormatError(str(exc), lineno) from None

    if vid + 1 != header.num_vertices:
        raise GraphFormatError(
            f"header lists {header.num_vertices} vertices, body has "
            f"{vid + 1} vertex lines"
        )

    for lineno, line in lines:
        if line.strip():
            raise GraphFormatError("more vertex lines than header", lineno)

    if lower != upper or lower != header.num_edges:
        raise GraphFormatError(
            f"header lists {header.num_edges} edges, body has {lower} "
            f"forward and {upper} backward entries"
        )

    logging.debug(f"read chaco graph {graph}")
    return graph


def write_chaco(graph, sink):
    """write the undirected view of graph to sink in chaco format

    edge weights are written, fmt 001, unless all weights are 1.0
    """
    view = undirected_view(graph)
    weighted = bool(np.any(view.weight != 1.0))
    fmt = "001" if weighted else "000"
    header = ChacoHeader(view.num_vertices, view.num_pairs, fmt)
    sink.write(header.format() + "\n")
    adjacency = view.adjacency
    for vid in range(view.num_vertices):
        start, stop = adjacency.indptr[vid : vid + 2]
        parts = []
        for neighbor, weight in zip(
            adjacency.indices[start:stop], adjacency.data[start:stop]
        ):
            parts.append(str(neighbor + 1))
            if weighted:
                parts.append(repr(float(weight)))
        sink.write(" ".join(parts) + "\n")


def _gml_value(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def to_networkx(graph, partition_map=None):
    """convert to a networkx MultiDiGraph keeping kinds, labels and ids"""
    nxgraph = nx.MultiDiGraph()
    for vertex in graph.vertices:
        attrs = {
            key: _gml_value(value)
            for key, value in vertex.properties.items()
        }
        attrs[GML_KIND] = vertex.kind.value
        if partition_map is not None:
            attrs[GML_PARTITION] = partition_map[vertex.id]
        nxgraph.add_node(vertex.id, **attrs)

    for edge in graph.edges:
        attrs = {
            key: _gml_value(value) for key, value in edge.properties.items()
        }
        attrs[GML_EDGE_ID] = edge.id
        attrs[GML_WEIGHT] = edge.weight
        attrs[GML_RELATION] = edge.label.value
        nxgraph.add_edge(edge.start, edge.end, **attrs)
    return nxgraph


def write_gml(graph, sink, partition_map=None):
    """write graph to sink as a directed gml document

    vertex kind, coordinates, other properties and the partition id are
    written as node attributes
    """
    if partition_map is not None:
        partition_map.check_total(graph)

    used = {key for vertex in graph.vertices for key in vertex.properties}
    clashes = used & (GML_RESERVED | {GML_KIND, GML_PARTITION})
    if clashes:
        raise ValueError(f"vertex properties {sorted(clashes)} clash with gml")

    nxgraph = to_networkx(graph, partition_map)
    for line in nx.generate_gml(nxgraph):
        sink.write(line + "\n")


def load_gml(source, k=None):
    """parse a gml document into a graph and its partition map

    source: text stream or iterable of lines
    k: partition count, defaults to one more than the largest partition id
    returns (graph, partition map or None when no partition attributes)
    """
    try:
        nxgraph = nx.parse_gml(
            (line.rstrip("\n") for line in source), label="id"
        )
    except (nx.NetworkXError, ValueError) as exc:
        raise GraphFormatError(f"malformed gml: {exc}") from exc

    graph = Graph()
    dense = {}
    partitions = []
    for node, attrs in nxgraph.nodes(data=True):
        attrs = dict(attrs)
        kind = attrs.pop(GML_KIND, VertexKind.GENERIC.value)
        partitions.append(attrs.pop(GML_PARTITION, None))
        attrs.pop("label", None)
        try:
            dense[node] = graph.add_vertex(kind, **attrs)
        except ValueError as exc:
            raise GraphFormatError(f"node {node}: {exc}") from None

    edges = []
    for order, (source_node, target_node, attrs) in enumerate(
        nxgraph.edges(data=True)
    ):
        attrs = dict(attrs)
        eid = attrs.pop(GML_EDGE_ID, order)
        edges.append((eid, order, source_node, target_node, attrs))

    for _, _, source_node, target_node, attrs in sorted(
        edges, key=lambda item: item[:2]
    ):
        weight = attrs.pop(GML_WEIGHT, 1.0)
        label = attrs.pop(GML_RELATION, EdgeLabel.LINK.value)
        attrs.pop("key", None)
        try:
            graph.add_edge(
                dense[source_node],
                dense[target_node],
                weight,
                label,
                **attrs,
            )
        except ValueError as exc:
            raise GraphFormatError(
                f"edge {source_node}->{target_node}: {exc}"
            ) from None

    if all(pid is None for pid in partitions) or not partitions:
        return graph, None
    if any(pid is None for pid in partitions):
        raise GraphFormatError("partition attribute missing on some nodes")

    if k is None:
        k = max(partitions) + 1
    return graph, PartitionMap(partitions, k)


def read_gml(source):
    """parse a gml document into a graph"""
    graph, _ = load_gml(source)
    return graph


def write_partition_map(partition_map, sink):
    """write a partition map, header "k n" then one id per vertex"""
    sink.write(f"{partition_map.k} {len(partition_map)}\n")
    for pid in partition_map.assignment:
        sink.write(f"{pid}\n")


def read_partition_map(source):
    """read a partition map written by write_partition_map"""
    lines = enumerate(source, start=1)
    try:
        lineno, header = next(lines)
        k, count = (int(part) for part in header.split())
    except StopIteration:
        raise GraphFormatError("empty partition map", 1) from None
    except ValueError:
        raise GraphFormatError("malformed partition map header", 1) from None

    assignment = []
    for lineno, line in lines:
        if not line.strip():
            continue
        try:
            assignment.append(int(line))
        except ValueError:
            raise GraphFormatError(
                f"non-numeric partition id {line.strip()!r}", lineno
            ) from None

    if len(assignment) != count:
        raise GraphFormatError(
            f"header lists {count} vertices, found {len(assignment)}"
        )
    try:
        return PartitionMap(assignment, k)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None
