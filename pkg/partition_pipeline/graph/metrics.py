"""partitioning quality and load balance metrics

all quality metrics are computed on the undirected view of the graph, every
unordered vertex pair is counted once with its merged weight.
"""
import dataclasses
import logging
import math

import numpy as np

from .core import undirected_view


class MetricError(ValueError):
    """a metric is undefined for its input, e.g. zero volume or zero mean"""


@dataclasses.dataclass
class QualityReport:
    """partition quality of one partition map

    edge_cut_fraction: edge_cut_weight over the total undirected weight
    conductance, modularity: nan when undefined for the partitioning
    """

    edge_cut_weight: float
    edge_cut_fraction: float
    conductance: float
    modularity: float
    partition_count_dev: int
    partition_size_stdev: float

    def as_row(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass
class BalanceReport:
    """coefficients of variation, in percent, over all partitions"""

    cov_vertices: float
    cov_edges: float
    cov_traffic: float

    def as_row(self):
        return dataclasses.asdict(self)


def _sides(graph, partition_map):
    partition_map.check_total(graph)
    view = undirected_view(graph)
    assignment = partition_map.assignment
    return view, assignment[view.src], assignment[view.dst]


def volume(graph, partition_map, part):
    """sum of the degrees of the vertices in partition part"""
    partition_map.check_total(graph)
    view = undirected_view(graph)
    return float(view.degree[partition_map.assignment == part].sum())


def volumes(graph, partition_map):
    """volume of every partition as an array of length k"""
    partition_map.check_total(graph)
    view = undirected_view(graph)
    return np.bincount(
        partition_map.assignment,
        weights=view.degree,
        minlength=partition_map.k,
    )


def intra_weight(graph, partition_map, part):
    """weight of the edges with both endpoints in partition part"""
    view, src, dst = _sides(graph, partition_map)
    inside = (src == part) & (dst == part)
    return float(view.weight[inside].sum())


def partition_degree(graph, partition_map, part):
    """weight of the edges with exactly one endpoint in partition part"""
    view, src, dst = _sides(graph, partition_map)
    leaving = (src == part) != (dst == part)
    return float(view.weight[leaving].sum())


def partition_degrees(graph, partition_map):
    """partition degree of every partition as an array of length k"""
    view, src, dst = _sides(graph, partition_map)
    crossing = src != dst
    k = partition_map.k
    weights = view.weight[crossing]
    return np.bincount(src[crossing], weights=weights, minlength=k) + (
        np.bincount(dst[crossing], weights=weights, minlength=k)
    )


def edge_cut(graph, partition_map):
    """weight of the crossing edges, counted once, and its fraction

    returns (weight, fraction), fraction is 0 for a graph without edges
    """
    view, src, dst = _sides(graph, partition_map)
    weight = float(view.weight[src != dst].sum())
    total = view.total_weight
    return weight, weight / total if total > 0 else 0.0


def conductance(graph, partition_map):
    """minimum over all partitions of partition degree over volume"""
    vols = volumes(graph, partition_map)
    if np.any(vols <= 0):
        empty = np.flatnonzero(vols <= 0).tolist()
        raise MetricError(f"partitions {empty} have zero volume")
    return float(np.min(partition_degrees(graph, partition_map) / vols))


def modularity(graph, partition_map):
    """actual intra weight minus its expectation, summed over partitions"""
    view, src, dst = _sides(graph, partition_map)
    total = view.total_weight
    if total <= 0:
        raise MetricError("modularity of a graph without edge weight")

    inside = src == dst
    intra = np.bincount(
        src[inside], weights=view.weight[inside], minlength=partition_map.k
    )
    vols = volumes(graph, partition_map)
    return float(np.sum(intra / total - (vols / (2 * total)) ** 2))


def partition_count_dev(partition_map, desired_k):
    """distance between the number of non-empty partitions and desired_k"""
    created = int(np.count_nonzero(partition_map.sizes()))
    return abs(created - desired_k)


def partition_size_stdev(partition_map):
    """population standard deviation of the sizes of all k partitions"""
    return float(np.std(partition_map.sizes()))


def coefficient_of_variation(values):
    """population standard deviation as a percentage of the mean"""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise MetricError("coefficient of variation of no values")
    mean = values.mean()
    if mean <= 0:
        raise MetricError(f"coefficient of variation with mean {mean}")
    return float(100 * values.std() / mean)


def percentage_global(total_traffic, global_traffic):
    """fraction of the total traffic that crossed partitions"""
    if total_traffic <= 0:
        raise MetricError("percentage global without traffic")
    if not 0 <= global_traffic <= total_traffic:
        raise MetricError(
            f"global traffic {global_traffic} outside [0, {total_traffic}]"
        )
    return global_traffic / total_traffic


def predicted_percentage_global(t_pg, t_l, ec_fraction):
    """expected percentage global of a uniform traversal

    t_pg: potentially global units per traversal step
    t_l: local units per traversal step
    ec_fraction: edge cut as a fraction of the total weight
    """
    if t_pg < 0 or t_l < 0:
        raise MetricError("traffic units have to be non-negative")
    if not 0 <= ec_fraction <= 1:
        raise MetricError(f"edge cut fraction {ec_fraction} outside [0, 1]")
    if t_pg + t_l == 0:
        raise MetricError("no traffic units per step")
    return t_pg * ec_fraction / (t_l + t_pg)


def _or_nan(metric, *args):
    try:
        return metric(*args)
    except MetricError as exc:
        logging.warning(f"{metric.__name__} undefined: {exc}")
        return math.nan


def quality_report(graph, partition_map, desired_k=None):
    """all quality metrics of partition_map in one report

    desired_k: defaults to the partition count of the map
    """
    if desired_k is None:
        desired_k = partition_map.k

    weight, fraction = edge_cut(graph, partition_map)
    return QualityReport(
        edge_cut_weight=weight,
        edge_cut_fraction=fraction,
        conductance=_or_nan(conductance, graph, partition_map),
        modularity=_or_nan(modularity, graph, partition_map),
        partition_count_dev=partition_count_dev(partition_map, desired_k),
        partition_size_stdev=partition_size_stdev(partition_map),
    )


def _balance(values):
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0 or np.all(values == values[0]):
        return 0.0
    return coefficient_of_variation(values)


def balance_report(infos):
    """coefficients of variation of per-partition sizes and traffic

    infos: per-partition counters with num_vertices, num_edges and
        total_traffic, e.g. the emulator's InstanceInfo snapshots
    """
    return BalanceReport(
        cov_vertices=_balance([info.num_vertices for info in infos]),
        cov_edges=_balance([info.num_edges for info in infos]),
        cov_traffic=_balance([info.total_traffic for info in infos]),
    )
