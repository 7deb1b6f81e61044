"""structural statistics of generated datasets"""
import collections

import networkx as nx
import numpy as np

from ..graph.core import Direction, undirected_view


def to_simple_networkx(graph):
    """undirected networkx graph of the undirected view, without weights"""
    view = undirected_view(graph)
    nxgraph = nx.Graph()
    nxgraph.add_nodes_from(range(view.num_vertices))
    nxgraph.add_edges_from(zip(view.src.tolist(), view.dst.tolist()))
    return nxgraph


def clustering_coefficient(graph, vertices=None):
    """average local clustering coefficient on the undirected view

    vertices: only average over these, the whole graph by default
    """
    if graph.num_vertices == 0:
        return 0.0
    return float(nx.average_clustering(to_simple_networkx(graph), vertices))


def degrees(graph, view=Direction.BOTH):
    """number of incident edges of every vertex"""
    view = Direction(view)
    return np.array(
        [len(graph.edge_ids(vid, view)) for vid in range(graph.num_vertices)],
        dtype=np.int64,
    )


def degree_histogram(graph, view=Direction.BOTH):
    """histogram[d] is the number of vertices with d incident edges"""
    return np.bincount(degrees(graph, view))


def describe(graph):
    """summary of a graph as a plain dict"""
    kinds = collections.Counter(vertex.kind.value for vertex in graph.vertices)
    n = graph.num_vertices
    return {
        "vertices": n,
        "edges": graph.num_edges,
        "average_degree": 2 * graph.num_edges / n if n else 0.0,
        "clustering_coefficient": clustering_coefficient(graph),
        "kinds": dict(sorted(kinds.items())),
    }
