"""small reference topologies built with networkx generators"""
import networkx as nx

from ..graph.core import EdgeLabel, Graph, PartitionMap, VertexKind


class DatasetSpecError(ValueError):
    """a dataset spec cannot be generated"""


def from_networkx(nxgraph, kind=VertexKind.GENERIC, label=EdgeLabel.LINK):
    """convert a networkx graph with nodes 0..n-1 into a Graph

    undirected edges are stored once, from the lower to the higher id,
    a "weight" edge attribute is kept, 1.0 otherwise
    """
    nodes = sorted(nxgraph.nodes)
    if nodes != list(range(len(nodes))):
        raise ValueError("networkx nodes have to be 0..n-1")

    graph = Graph()
    for _ in nodes:
        graph.add_vertex(kind)
    for u, v, data in nxgraph.edges(data=True):
        if not nxgraph.is_directed() and u > v:
            u, v = v, u
        graph.add_edge(u, v, data.get("weight", 1.0), label)
    return graph


def generate_fully_connected(num_vertices):
    """complete graph, one unit edge per vertex pair"""
    return from_networkx(nx.complete_graph(num_vertices))


def generate_random(num_vertices, num_edges, seed):
    """uniform random graph with exactly num_edges unit edges"""
    return from_networkx(nx.gnm_random_graph(num_vertices, num_edges, seed))


def generate_planted_partition(sizes, p_in, p_out, seed):
    """random graph with dense communities of the given sizes

    returns the graph and the planted partition map
    """
    nxgraph = nx.random_partition_graph(list(sizes), p_in, p_out, seed=seed)
    assignment = [0] * nxgraph.number_of_nodes()
    for pid, block in enumerate(nxgraph.graph["partition"]):
        for vid in block:
            assignment[vid] = pid
    return from_networkx(nxgraph), PartitionMap(assignment, len(sizes))
