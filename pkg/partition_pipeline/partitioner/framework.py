"""components that keep a partitioned graph database partitioned at runtime

InsertPartitioner places new or moved vertices, RuntimeLogger samples the
counters of an emulator, RuntimePartitioner repairs a partitioning with a
resumed diffusion session and MigrationScheduler turns a repaired map into
vertex moves.
"""
import dataclasses
import enum
import logging

import numpy as np

from ..graph.metrics import percentage_global
from .base import PartitionerError, PartitionMethod
from .baseline import (
    FsSubtreePartitioner,
    GisLongitudePartitioner,
    RandomPartitioner,
)
from .didic import DidicPartitioner, DidicSession


class InsertPolicy(str, enum.Enum):
    """where a new or moved vertex goes

    RANDOM: a uniformly random partition
    FEWEST_VERTICES: the partition with the fewest vertices
    LEAST_TRAFFIC: the partition with the least traffic so far
    ties go to the lowest partition id
    """

    RANDOM = "RANDOM"
    FEWEST_VERTICES = "FEWEST_VERTICES"
    LEAST_TRAFFIC = "LEAST_TRAFFIC"


def make_partitioner(spec, didic_config=None, progress=True):
    """partitioner for spec, didic_config and progress only apply to DIDIC"""
    spec.validate()
    match spec.method:
        case PartitionMethod.RANDOM:
            return RandomPartitioner(spec.k, spec.seed)
        case PartitionMethod.HARDCODED_FS:
            return FsSubtreePartitioner(spec.k, spec.seed)
        case PartitionMethod.HARDCODED_GIS_LON:
            return GisLongitudePartitioner(spec.k, spec.seed)
        case PartitionMethod.DIDIC:
            return DidicPartitioner(
                spec.k, spec.seed, didic_config, progress
            )
        case _:
            raise PartitionerError(f"no partitioner for {spec.method!r}")


class InsertPartitioner:
    """chooses a partition for vertices that are added or moved

    rng: numpy generator used by the RANDOM policy
    """

    def __init__(self, policy, rng):
        self.policy = InsertPolicy(policy)
        self.rng = rng

    def __repr__(self):
        return f"{self.__class__.__name__}({self.policy.value!r})"

    def assign(self, vertex, emulator):
        """partition id for vertex given the current emulator counters"""
        infos = emulator.snapshot_all()
        match self.policy:
            case InsertPolicy.RANDOM:
                return int(self.rng.integers(len(infos)))
            case InsertPolicy.FEWEST_VERTICES:
                counts = [info.num_vertices for info in infos]
            case InsertPolicy.LEAST_TRAFFIC:
                counts = [info.total_traffic for info in infos]
        return int(np.argmin(counts))


@dataclasses.dataclass
class RuntimeMetrics:
    """counters of all partitions at one moment

    pct_global: fraction of all traffic so far that was global, 0 without
        traffic
    """

    infos: list
    pct_global: float

    @property
    def total_traffic(self):
        return sum(info.total_traffic for info in self.infos)


class RuntimeLogger:
    """samples emulator counters, keeps every sample in history"""

    def __init__(self):
        self.history = []

    def __repr__(self):
        return f"{self.__class__.__name__}(samples={len(self.history)})"

    def snapshot(self, emulator):
        infos = emulator.snapshot_all()
        total = sum(info.total_traffic for info in infos)
        global_traffic = sum(info.global_traffic for info in infos)
        pct = percentage_global(total, global_traffic) if total else 0.0
        metrics = RuntimeMetrics(infos, pct)
        self.history.append(metrics)
        return metrics


class RuntimePartitioner:
    """repairs a partitioning with iterations of a diffusion session

    session: session holding the load state of the last partitioning
    iterations: iterations per repair
    reinit_loads: restart the loads from the degraded map instead of
        resuming the stored load state
    """

    def __init__(self, session, iterations=1, reinit_loads=False):
        self.session = session
        self.iterations = iterations
        self.reinit_loads = reinit_loads

    def __repr__(self):
        args = self.session, self.iterations, self.reinit_loads
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    def repartition(self, graph, partition_map, change_log, metrics=None):
        """repaired partition map after the changes in change_log

        partition_map: current, degraded partitioning
        metrics: optional runtime sample, only logged
        """
        if graph is not self.session.graph:
            raise PartitionerError("session belongs to another graph")
        if metrics is not None:
            logging.debug(
                f"repartitioning at pct_global {metrics.pct_global:.4f}"
            )

        if self.reinit_loads:
            self.session.reinitialize(partition_map)
        else:
            self.session.apply_changes(change_log)
            if self.session.partition_map != partition_map:
                logging.warning(
                    "resumed session disagrees with the current map, "
                    "restarting from the current map"
                )
                self.session.reinitialize(partition_map)

        for _ in range(self.iterations):
            self.session.iterate()
        return self.session.partition_map.copy()

    @classmethod
    def from_baseline(cls, graph, partition_map, config, state, **kwargs):
        """runtime partitioner resuming state of a finished diffusion run"""
        return cls(DidicSession(graph, partition_map, config, state), **kwargs)


class MigrationCommand:
    """move vertices to the partition target"""

    def __init__(self, target, vertices):
        self.target = int(target)
        self.vertices = np.asarray(vertices, dtype=np.int64)

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(target={self.target}, "
            f"vertices={self.vertices.size})"
        )


class MigrationScheduler:
    """turns the difference of two partition maps into vertex moves

    max_moves_per_batch: largest command, None moves everything at once
    """

    def __init__(self, max_moves_per_batch=None):
        if max_moves_per_batch is not None and max_moves_per_batch < 1:
            raise ValueError("max_moves_per_batch has to be >= 1")
        self.max_moves_per_batch = max_moves_per_batch

    def __repr__(self):
        return f"{self.__class__.__name__}({self.max_moves_per_batch!r})"

    def schedule(self, current, target):
        """commands that turn current into target, grouped by partition"""
        if len(current) != len(target) or current.k != target.k:
            raise PartitionerError("partition maps do not match")

        changed = np.flatnonzero(current.assignment != target.assignment)
        commands = []
        for pid in range(target.k):
            vertices = changed[target.assignment[changed] == pid]
            if not vertices.size:
                continue
            size = self.max_moves_per_batch or vertices.size
            for start in range(0, vertices.size, size):
                commands.append(
                    MigrationCommand(pid, vertices[start : start + size])
                )
        return commands

    def apply(self, emulator, commands):
        """run commands on emulator, returns the number of moved vertices"""
        moved = 0
        for command in commands:
            emulator.move_vertices(command.vertices, command.target)
            moved += command.vertices.size
        logging.debug(f"migrated {moved} vertices in {len(commands)} moves")
        return moved
