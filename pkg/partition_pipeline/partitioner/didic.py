"""distributed diffusive clustering

every partition c owns two diffusion systems over the undirected view, a
primary load w[:, c] that settles in dense regions and a secondary load
l[:, c] that disturbs it. the secondary load is divided by a benefit, high
on the current members of c, so it accumulates on them and keeps feeding
the primary system there. vertices join the partition with the most
primary load.

all updates are synchronous, a step reads the previous load column and
writes a new one, so results do not depend on vertex order or on how many
systems run in parallel.
"""
import concurrent.futures
import csv
import dataclasses
import enum
import logging

import numpy as np
import scipy.sparse
from tqdm import tqdm

from ..graph.core import PartitionMap, PartitionMapError, undirected_view
from .base import PartitionMethod, Partitioner

INITIAL_LOAD = 100.0
ITERATIONS = 100
PSI = 11  # primary steps per system per iteration
RHO = 11  # secondary steps per primary step
BENEFIT_HIGH = 10.0
BENEFIT_LOW = 1.0


class DidicConfigError(ValueError):
    """invalid diffusion settings"""


class FlowScaleMode(str, enum.Enum):
    """how much of the load difference crosses an edge per step

    INV_MAX_DEGREE: 1 / (1 + larger unweighted degree of the endpoints)
    CONSTANT: the same factor for all edges
    """

    INV_MAX_DEGREE = "INV_MAX_DEGREE"
    CONSTANT = "CONSTANT"


@dataclasses.dataclass
class DidicConfig:
    """settings of a diffusion run

    k: partition count, one primary and one secondary system each
    iterations: outer iterations of a full run
    psi: primary steps per system and iteration
    rho: secondary steps before every primary step
    flow_scale: factor used by CONSTANT mode
    parallel: threads diffusing systems side by side
    """

    k: int = 2
    iterations: int = ITERATIONS
    psi: int = PSI
    rho: int = RHO
    benefit_high: float = BENEFIT_HIGH
    benefit_low: float = BENEFIT_LOW
    flow_scale_mode: FlowScaleMode = FlowScaleMode.INV_MAX_DEGREE
    flow_scale: float = 0.5
    seed: int = 0
    parallel: int = 1

    def validate(self):
        try:
            self.flow_scale_mode = FlowScaleMode(self.flow_scale_mode)
        except ValueError:
            raise DidicConfigError(
                f"unknown flow scale mode {self.flow_scale_mode!r}"
            ) from None
        for name in ("k", "psi", "rho", "parallel"):
            if getattr(self, name) < 1:
                raise DidicConfigError(f"{name} has to be >= 1")
        if self.iterations < 0:
            raise DidicConfigError("iterations has to be >= 0")
        if not self.benefit_high > self.benefit_low > 0:
            raise DidicConfigError(
                "benefits need benefit_high > benefit_low > 0, got "
                f"{self.benefit_high} and {self.benefit_low}"
            )
        if (
            self.flow_scale_mode is FlowScaleMode.CONSTANT
            and not 0 < self.flow_scale <= 1
        ):
            raise DidicConfigError(
                f"constant flow scale {self.flow_scale} outside (0, 1]"
            )
        return self


class LoadState:
    """primary and secondary load of every vertex in every system

    w, l: arrays of shape (vertices, k)
    """

    def __init__(self, w, l):
        w = np.asarray(w, dtype=np.float64)
        l = np.asarray(l, dtype=np.float64)
        if w.shape != l.shape or w.ndim != 2:
            raise ValueError(
                f"load shapes {w.shape} and {l.shape} do not match"
            )
        self.w = w
        self.l = l

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(vertices={self.num_vertices}, "
            f"k={self.k})"
        )

    @property
    def num_vertices(self):
        return self.w.shape[0]

    @property
    def k(self):
        return self.w.shape[1]

    def copy(self):
        return LoadState(self.w.copy(), self.l.copy())

    def is_finite(self):
        return bool(np.isfinite(self.w).all() and np.isfinite(self.l).all())


def init_load(graph, partition_map, k):
    """load state with INITIAL_LOAD in the system of every vertex"""
    partition_map.check_total(graph)
    if partition_map.k != k:
        raise PartitionMapError(
            f"partition map has {partition_map.k} partitions, expected {k}"
        )
    w = np.zeros((graph.num_vertices, k))
    w[np.arange(graph.num_vertices), partition_map.assignment] = INITIAL_LOAD
    return LoadState(w, w.copy())


def flow_scales(view, config):
    """flow scale of every pair of the undirected view"""
    if config.flow_scale_mode is FlowScaleMode.CONSTANT:
        return np.full(view.num_pairs, float(config.flow_scale))
    counts = view.degree_count
    return 1.0 / (1 + np.maximum(counts[view.src], counts[view.dst]))


def flow_scale(graph, u, v, config):
    """flow scale of the undirected edge between u and v"""
    if config.flow_scale_mode is FlowScaleMode.CONSTANT:
        return float(config.flow_scale)
    counts = undirected_view(graph).degree_count
    return 1.0 / (1 + max(counts[u], counts[v]))


def diffusion_laplacian(graph, config):
    """sparse laplacian of the pair weights times their flow scale

    multiplying a load column by it gives the net outflow of every vertex
    """
    view = undirected_view(graph)
    scaled = view.weight * flow_scales(view, config)
    n = view.num_vertices
    upper = scipy.sparse.coo_matrix(
        (scaled, (view.src, view.dst)), shape=(n, n)
    )
    adjacency = (upper + upper.T).tocsr()
    outflow = np.asarray(adjacency.sum(axis=1)).ravel()
    return (scipy.sparse.diags(outflow) - adjacency).tocsr()


def benefit(partition_map, c, config):
    """benefit of every vertex in system c"""
    return np.where(
        partition_map.assignment == c, config.benefit_high, config.benefit_low
    )


def _secondary(laplacian, l, b):
    return l - laplacian @ (l / b)


def _primary(laplacian, w, l, b, rho):
    for _ in range(rho):
        l = _secondary(laplacian, l, b)
    return w + l - laplacian @ w, l


def _diffuse_system(laplacian, w, l, b, psi, rho):
    for _ in range(psi):
        w, l = _primary(laplacian, w, l, b, rho)
    return w, l


def _check_dimensions(graph, state, partition_map):
    partition_map.check_total(graph)
    if state.num_vertices != graph.num_vertices:
        raise DidicConfigError(
            f"load state covers {state.num_vertices} vertices, graph has "
            f"{graph.num_vertices}"
        )
    if state.k != partition_map.k:
        raise DidicConfigError(
            f"load state has {state.k} systems for {partition_map.k} "
            "partitions"
        )


def secondary_step(graph, state, c, partition_map, config, laplacian=None):
    """one secondary diffusion step of system c, returns a new state"""
    _check_dimensions(graph, state, partition_map)
    if laplacian is None:
        laplacian = diffusion_laplacian(graph, config)
    new = state.copy()
    new.l[:, c] = _secondary(
        laplacian, state.l[:, c], benefit(partition_map, c, config)
    )
    return new


def primary_step(
    graph, state, c, partition_map, config, rho=None, laplacian=None
):
    """rho secondary steps then one primary step of system c

    returns a new state
    """
    _check_dimensions(graph, state, partition_map)
    if laplacian is None:
        laplacian = diffusion_laplacian(graph, config)
    rho = config.rho if rho is None else rho
    new = state.copy()
    new.w[:, c], new.l[:, c] = _primary(
        laplacian,
        state.w[:, c],
        state.l[:, c],
        benefit(partition_map, c, config),
        rho,
    )
    return new


def affiliate(state, vid):
    """system with the most primary load at vid, ties go to the lowest"""
    return int(np.argmax(state.w[vid]))


def affiliate_all(state):
    return PartitionMap(np.argmax(state.w, axis=1), state.k)


class ChangeKind(str, enum.Enum):
    ADD = "ADD"
    DELETE = "DELETE"
    MOVE = "MOVE"


class Change:
    """a change to the graph the load state has to follow

    target: partition of an ADD or MOVE, None picks one at random
    """

    def __init__(self, kind, vertex, target=None):
        self.kind = ChangeKind(kind)
        self.vertex = int(vertex)
        self.target = None if target is None else int(target)

    def __repr__(self):
        args = self.kind.value, self.vertex, self.target
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    def __eq__(self, other):
        if not isinstance(other, Change):
            return NotImplemented
        return (self.kind, self.vertex, self.target) == (
            other.kind,
            other.vertex,
            other.target,
        )


class ChangeLog:
    """ordered changes collected between two diffusion iterations"""

    def __init__(self, changes=()):
        self.changes = list(changes)

    def __repr__(self):
        return f"{self.__class__.__name__}(changes={len(self)})"

    def __len__(self):
        return len(self.changes)

    def __iter__(self):
        return iter(self.changes)

    @classmethod
    def from_moves(cls, vertices, targets):
        return cls(
            Change(ChangeKind.MOVE, vid, target)
            for vid, target in zip(vertices, targets)
        )

    def add(self, vertex, target=None):
        self.changes.append(Change(ChangeKind.ADD, vertex, target))

    def delete(self, vertex):
        self.changes.append(Change(ChangeKind.DELETE, vertex))

    def move(self, vertex, target):
        self.changes.append(Change(ChangeKind.MOVE, vertex, target))

    def vertices(self):
        return sorted({change.vertex for change in self.changes})

    def clear(self):
        self.changes.clear()


def _remove_load(view, state, vid):
    neighbors = view.neighbors(vid)
    if neighbors.size:
        state.w[neighbors] += state.w[vid] / neighbors.size
        state.l[neighbors] += state.l[vid] / neighbors.size
    elif state.w[vid].any() or state.l[vid].any():
        logging.warning(f"dropped load of vertex {vid}, it has no neighbors")
    state.w[vid] = 0.0
    state.l[vid] = 0.0


def _place_load(state, vid, target):
    state.w[vid] = 0.0
    state.l[vid] = 0.0
    state.w[vid, target] = INITIAL_LOAD
    state.l[vid, target] = INITIAL_LOAD


def adapt_to_changes(graph, state, changes, rng):
    """load state after applying changes, the input state is kept

    DELETE: the load of the vertex is shared equally by its neighbors
    ADD: the vertex starts with initial load in its target system, a random
        one when the change has no target
    MOVE: DELETE followed by an ADD to the target
    rng: numpy generator drawing random targets
    """
    view = undirected_view(graph)
    new = state.copy()
    for change in changes:
        graph.vertex(change.vertex)
        if change.kind in (ChangeKind.DELETE, ChangeKind.MOVE):
            _remove_load(view, new, change.vertex)
        if change.kind in (ChangeKind.ADD, ChangeKind.MOVE):
            target = change.target
            if target is None:
                target = int(rng.integers(state.k))
            if not 0 <= target < state.k:
                raise PartitionMapError(
                    f"change targets partition {target} of {state.k}"
                )
            _place_load(new, change.vertex, target)
    return new


def didic_iteration(
    graph,
    state,
    partition_map,
    config,
    change_log=None,
    laplacian=None,
    rng=None,
    executor=None,
):
    """diffuse every system psi times, re-affiliate, then adapt to changes

    executor: optional thread pool that diffuses systems in parallel
    returns (state, partition map), the inputs are not modified
    """
    _check_dimensions(graph, state, partition_map)
    if laplacian is None:
        laplacian = diffusion_laplacian(graph, config)

    def diffuse(c):
        return _diffuse_system(
            laplacian,
            state.w[:, c],
            state.l[:, c],
            benefit(partition_map, c, config),
            config.psi,
            config.rho,
        )

    systems = range(state.k)
    if executor is None:
        columns = [diffuse(c) for c in systems]
    else:
        columns = list(executor.map(diffuse, systems))

    new = LoadState(
        np.column_stack([w for w, _ in columns]),
        np.column_stack([l for _, l in columns]),
    )
    if not new.is_finite():
        raise FloatingPointError("diffusion produced non finite load")

    if change_log:
        if rng is None:
            rng = np.random.default_rng(config.seed)
        new = adapt_to_changes(graph, new, change_log, rng)

    return new, affiliate_all(new)


def save_load_state(state, path):
    """store a load state as a numpy npz archive"""
    np.savez(path, w=state.w, l=state.l)


def load_load_state(path):
    with np.load(path) as archive:
        return LoadState(archive["w"], archive["l"])


def write_load_csv(state, sink):
    """write vertex,system,primary,secondary rows for inspection"""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["vertex", "system", "primary", "secondary"])
    for vid in range(state.num_vertices):
        for c in range(state.k):
            writer.writerow(
                [
                    vid,
                    c,
                    repr(float(state.w[vid, c])),
                    repr(float(state.l[vid, c])),
                ]
            )


class DidicSession:
    """keeps the load state of a graph between iterations

    graph: graph to partition, its structure must not change
    partition_map: initial partition map with config.k partitions
    state: load state to resume, initialised from partition_map if None
    """

    def __init__(self, graph, partition_map, config, state=None):
        config.validate()
        self.graph = graph
        self.config = config
        self.partition_map = partition_map.copy()
        if state is None:
            state = init_load(graph, partition_map, config.k)
        _check_dimensions(graph, state, self.partition_map)
        self.state = state
        self.laplacian = diffusion_laplacian(graph, config)
        self.rng = np.random.default_rng(config.seed)
        self.iterations_done = 0

    def __repr__(self):
        return (
            f"{self.__class__.__name__}({self.graph!r}, k={self.config.k}, "
            f"iterations_done={self.iterations_done})"
        )

    def reinitialize(self, partition_map):
        """drop the load state and restart from partition_map"""
        self.partition_map = partition_map.copy()
        self.state = init_load(self.graph, partition_map, self.config.k)

    def apply_changes(self, change_log):
        """follow changes, the changed vertices are re-affiliated"""
        self.state = adapt_to_changes(
            self.graph, self.state, change_log, self.rng
        )
        for vid in change_log.vertices():
            self.partition_map.assign(vid, affiliate(self.state, vid))
        return self.partition_map

    def iterate(self, change_log=None, executor=None):
        self.state, self.partition_map = didic_iteration(
            self.graph,
            self.state,
            self.partition_map,
            self.config,
            change_log,
            self.laplacian,
            self.rng,
            executor,
        )
        self.iterations_done += 1
        return self.partition_map

    def run(self, iterations=None, progress=True):
        """run iterations, config.iterations by default

        returns the partition map after the last iteration
        """
        if iterations is None:
            iterations = self.config.iterations

        executor = None
        if self.config.parallel > 1 and self.config.k > 1:
            executor = concurrent.futures.ThreadPoolExecutor(
                max_workers=self.config.parallel
            )
        try:
            for _ in tqdm(
                range(iterations),
                desc="diffusing",
                unit="it",
                disable=not progress or iterations == 0,
            ):
                self.iterate(executor=executor)
        finally:
            if executor is not None:
                executor.shutdown()

        return self.partition_map

    def save(self, path):
        save_load_state(self.state, path)


def run_didic(graph, partition_map, config, progress=True):
    """partition map after config.iterations iterations from partition_map"""
    session = DidicSession(graph, partition_map, config)
    result = session.run(progress=progress)
    logging.info(
        f"diffused {graph} for {session.iterations_done} iterations"
    )
    return result


class DidicPartitioner(Partitioner):
    """diffusion partitioner starting from a seeded random assignment

    config: diffusion settings, its k and seed are replaced by the
        partitioner's
    progress: show a tqdm bar while diffusing
    """

    method = PartitionMethod.DIDIC

    def __init__(self, k, seed=0, config=None, progress=True):
        super().__init__(k, seed)
        self.progress = progress
        config = DidicConfig() if config is None else config
        self.config = dataclasses.replace(config, k=k, seed=seed).validate()
        self.session = None

    def partition(self, graph):  # override
        rng = np.random.default_rng(self.seed)
        initial = PartitionMap(
            rng.integers(self.k, size=graph.num_vertices), self.k
        )
        self.session = DidicSession(graph, initial, self.config)
        return self.session.run(progress=self.progress)
