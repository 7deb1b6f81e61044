"""synthetic road network around a handful of cities

dense, highly clustered street grids around every city center are joined by
sparse rural roads that follow a minimum spanning tree of the centers.
coordinates are degrees inside the box of CITY_CENTERS, edge weights are
travel times: euclidean length times a speed factor, clipped to (0, 1].
"""
import dataclasses
import logging

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
import scipy.spatial

from ..graph.core import LATITUDE, LONGITUDE, EdgeLabel, Graph, VertexKind
from .topology import DatasetSpecError

# name, longitude, latitude
CITY_CENTERS = [
    ("Bucharest", 26.10, 44.43),
    ("Iasi", 27.60, 47.16),
    ("Galati", 28.05, 45.44),
    ("Timisoara", 21.23, 45.76),
    ("Constanta", 28.63, 44.18),
]
LON_RANGE = (20.0, 30.0)
LAT_RANGE = (40.0, 50.0)
CITY = "city"
CITY_DISTANCE = "city_distance"
URBAN_SPEED_FACTOR = 4.0  # streets are slower than rural roads
RURAL_SPEED_FACTOR = 1.0
MIN_WEIGHT = 1e-6
SPUR_SHARE = 0.3  # share of rural vertices on dead end spurs


@dataclasses.dataclass
class GisGenSpec:
    """shape of a generated road network

    city_centers: (name, longitude, latitude) per city, the first
        num_cities of CITY_CENTERS by default
    urban_spread: standard deviation in degrees of points around a center
    urban_neighbors: every urban point connects to this many nearest points
    """

    seed: int = 0
    num_cities: int = 5
    city_centers: list = None
    urban_vertices_per_city: int = 1100
    rural_vertices: int = 4500
    urban_spread: float = 0.2
    urban_neighbors: int = 5

    def centers(self):
        if self.city_centers is None:
            return CITY_CENTERS[: self.num_cities]
        return [tuple(center) for center in self.city_centers]

    def validate(self):
        centers = self.centers()
        if self.num_cities < 1 or len(centers) != self.num_cities:
            raise DatasetSpecError(
                f"need {self.num_cities} city centers, have {len(centers)}"
            )
        for name, lon, lat in centers:
            if not (
                LON_RANGE[0] <= lon <= LON_RANGE[1]
                and LAT_RANGE[0] <= lat <= LAT_RANGE[1]
            ):
                raise DatasetSpecError(f"city {name} lies outside the box")
        if self.urban_vertices_per_city <= self.urban_neighbors:
            raise DatasetSpecError(
                "every city needs more urban vertices than urban_neighbors"
            )
        if self.urban_neighbors < 1 or self.urban_spread <= 0:
            raise DatasetSpecError("urban clusters need neighbors and spread")
        if self.rural_vertices < 0:
            raise DatasetSpecError("rural_vertices has to be >= 0")
        if self.rural_vertices and self.num_cities < 2:
            raise DatasetSpecError("rural roads need at least two cities")
        return self


class _Network:
    """points and undirected roads collected before building the graph"""

    def __init__(self):
        self.points = []
        self.roads = []

    def add_points(self, points):
        start = len(self.points)
        self.points.extend(map(tuple, points))
        return np.arange(start, len(self.points))

    def add_road(self, u, v, factor):
        if u != v:
            self.roads.append((min(u, v), max(u, v), factor))


def _urban(network, spec, rng, centers):
    cities = []
    for _, lon, lat in centers:
        points = rng.normal(
            (lon, lat), spec.urban_spread, (spec.urban_vertices_per_city, 2)
        )
        points[:, 0] = np.clip(points[:, 0], *LON_RANGE)
        points[:, 1] = np.clip(points[:, 1], *LAT_RANGE)
        ids = network.add_points(points)
        tree = scipy.spatial.cKDTree(points)
        _, nearest = tree.query(points, k=spec.urban_neighbors + 1)
        for local, row in enumerate(nearest):
            for other in row[1:]:
                network.add_road(
                    int(ids[local]), int(ids[other]), URBAN_SPEED_FACTOR
                )
        cities.append((ids, tree))
    return cities


def _corridor_edges(centers):
    coords = np.array([(lon, lat) for _, lon, lat in centers])
    distances = scipy.spatial.distance_matrix(coords, coords)
    tree = scipy.sparse.csgraph.minimum_spanning_tree(distances).tocoo()
    edges = sorted(zip(tree.row.tolist(), tree.col.tolist(), tree.data))
    return coords, edges


def _rural(network, spec, rng, centers, cities):
    coords, corridors = _corridor_edges(centers)
    lengths = np.array([length for _, _, length in corridors])
    shares = np.floor(spec.rural_vertices * lengths / lengths.sum())
    shares = shares.astype(np.int64)
    shares[: spec.rural_vertices - shares.sum()] += 1

    for (a, b, _), count in zip(corridors, shares):
        if count == 0:
            continue
        main = max(1, int(round(count * (1 - SPUR_SHARE))))
        spurs = count - main
        start = coords[a] + (coords[b] - coords[a]) * 0.05
        end = coords[b] + (coords[a] - coords[b]) * 0.05
        steps = np.linspace(0, 1, main)[:, None]
        points = start + (end - start) * steps
        points = points + rng.normal(0, 0.01, points.shape)
        chain = network.add_points(points)
        for u, v in zip(chain[:-1], chain[1:]):
            network.add_road(int(u), int(v), RURAL_SPEED_FACTOR)

        for city, endpoint in ((a, chain[0]), (b, chain[-1])):
            ids, tree = cities[city]
            _, nearest = tree.query(network.points[endpoint])
            network.add_road(
                int(endpoint), int(ids[nearest]), RURAL_SPEED_FACTOR
            )

        # dead ends of one to three vertices, at most one per chain vertex
        anchors = rng.permutation(chain)
        used = 0
        for anchor in anchors:
            if used >= spurs:
                break
            length = min(int(rng.integers(1, 4)), spurs - used)
            offset = rng.normal(0, 0.02, 2)
            base = np.array(network.points[anchor])
            points = base + offset * np.arange(1, length + 1)[:, None]
            spur = network.add_points(points)
            previous = int(anchor)
            for vid in spur:
                network.add_road(previous, int(vid), RURAL_SPEED_FACTOR)
                previous = int(vid)
            used += length


def _connect(network):
    """bridge every component to the largest one with the shortest road"""
    n = len(network.points)
    points = np.array(network.points)
    while True:
        rows = [u for u, _, _ in network.roads]
        cols = [v for _, v, _ in network.roads]
        adjacency = scipy.sparse.coo_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(n, n)
        )
        count, labels = scipy.sparse.csgraph.connected_components(
            adjacency, directed=False
        )
        if count == 1:
            return

        main = np.argmax(np.bincount(labels))
        inside = np.flatnonzero(labels == main)
        tree = scipy.spatial.cKDTree(points[inside])
        for component in range(count):
            if component == main:
                continue
            members = np.flatnonzero(labels == component)
            distances, nearest = tree.query(points[members])
            best = int(np.argmin(distances))
            network.add_road(
                int(members[best]),
                int(inside[nearest[best]]),
                RURAL_SPEED_FACTOR,
            )
        logging.info(f"bridged {count - 1} components of the road network")


def generate_gis(spec):
    """generate a connected road network, deterministic for spec.seed"""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    centers = spec.centers()
    network = _Network()
    cities = _urban(network, spec, rng, centers)
    if spec.rural_vertices:
        _rural(network, spec, rng, centers, cities)
    _connect(network)

    points = np.array(network.points)
    center_coords = np.array([(lon, lat) for _, lon, lat in centers])
    distance, city = scipy.spatial.cKDTree(center_coords).query(points)

    graph = Graph()
    for vid, (lon, lat) in enumerate(points):
        graph.add_vertex(
            VertexKind.GIS_POINT,
            **{
                LATITUDE: float(lat),
                LONGITUDE: float(lon),
                CITY: int(city[vid]),
                CITY_DISTANCE: float(distance[vid]),
            },
        )

    roads = {}
    for u, v, factor in network.roads:
        roads.setdefault((u, v), factor)
    for (u, v), factor in sorted(roads.items()):
        length = float(np.hypot(*(points[u] - points[v])))
        weight = min(1.0, max(MIN_WEIGHT, length * factor))
        graph.add_edge(u, v, weight, EdgeLabel.ROAD)

    logging.info(
        f"generated road network {graph} around {len(centers)} cities"
    )
    return graph


def coordinates(graph, vid):
    vertex = graph.vertex(vid)
    return vertex.properties[LONGITUDE], vertex.properties[LATITUDE]


def max_speed(graph):
    """largest ratio of euclidean length to weight over all roads

    euclidean distance divided by this never overestimates the cheapest
    path weight, so it is an admissible a* heuristic
    """
    speed = 0.0
    for edge in graph.edges:
        (x0, y0), (x1, y1) = coordinates(graph, edge.start), coordinates(
            graph, edge.end
        )
        speed = max(speed, float(np.hypot(x1 - x0, y1 - y0)) / edge.weight)
    if speed == 0.0:
        raise DatasetSpecError("road network has no roads with a length")
    return speed
