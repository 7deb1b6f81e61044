"""synthetic follower network

out-degrees follow a zipf law and followed users are picked by preferential
attachment on in-degree, which gives the heavy tailed, scale free shape of a
crawled social network. about 1.4 edges per vertex.
"""
import dataclasses
import logging

import numpy as np

from ..graph.core import EdgeLabel, Graph, VertexKind
from .topology import DatasetSpecError

TARGET_VERTICES = 10_000
EDGE_RATIO = 1.4
EXPONENT = 2.4
MAX_REJECTIONS = 64


@dataclasses.dataclass
class SocialGenSpec:
    """shape of a generated follower network

    edge_ratio: edges per vertex
    exponent: zipf exponent of the out-degree distribution, > 1
    """

    seed: int = 0
    target_vertices: int = TARGET_VERTICES
    edge_ratio: float = EDGE_RATIO
    exponent: float = EXPONENT

    def validate(self):
        if self.target_vertices < 1:
            raise DatasetSpecError("target_vertices has to be >= 1")
        if self.edge_ratio < 0:
            raise DatasetSpecError("edge_ratio has to be >= 0")
        if self.exponent <= 1:
            raise DatasetSpecError("exponent has to be > 1")
        return self

    @property
    def num_edges(self):
        n = self.target_vertices
        return min(int(round(self.edge_ratio * n)), n * (n - 1))


def _out_degrees(spec, rng):
    n = spec.target_vertices
    # every user follows someone before the degrees are trimmed to the edge
    # count, so the median user follows one other user
    degrees = np.minimum(rng.zipf(spec.exponent, n), n - 1)
    surplus = int(degrees.sum()) - spec.num_edges
    if surplus > 0:
        # drop follows uniformly, heavy users lose the most
        degrees = degrees - rng.multivariate_hypergeometric(degrees, surplus)
    while surplus < 0:
        weights = np.where(degrees < n - 1, degrees + 1, 0).astype(float)
        vid = rng.choice(n, p=weights / weights.sum())
        degrees[vid] += 1
        surplus += 1
    return degrees


def generate_social(spec):
    """generate a directed follower graph, deterministic for spec.seed"""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n = spec.target_vertices
    degrees = _out_degrees(spec, rng)

    graph = Graph()
    for _ in range(n):
        graph.add_vertex(VertexKind.SOCIAL_USER)

    # every vertex appears once plus once per follower gained
    pool = list(range(n))
    for vid in rng.permutation(n):
        vid = int(vid)
        followed = set()
        rejections = 0
        while len(followed) < degrees[vid]:
            if rejections < MAX_REJECTIONS:
                target = pool[int(rng.integers(len(pool)))]
            else:
                target = int(rng.integers(n))
            if target == vid or target in followed:
                rejections += 1
                continue
            followed.add(target)
            pool.append(target)
        for target in sorted(followed):
            graph.add_edge(vid, target, label=EdgeLabel.FOLLOWS)

    logging.info(f"generated follower network {graph}")
    return graph
