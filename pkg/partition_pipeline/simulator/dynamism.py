"""dynamism: vertex moves that emulate inserts without changing the graph

a unit of dynamism moves one vertex from its partition to a partition chosen
by an insert policy, possibly the one it is on. the level is the number of
units as a fraction of the vertex count.
"""
import dataclasses
import logging
import math

import numpy as np

from ..partitioner.didic import ChangeLog
from ..partitioner.framework import InsertPartitioner, InsertPolicy
from .logs import SEED, DynamismLog, DynamismRecord
from .operations import replay

LEVELS = (0.01, 0.02, 0.05, 0.10, 0.25)
BATCHES = 5


class DynamismSpecError(ValueError):
    """dynamism cannot be generated with these settings"""


@dataclasses.dataclass
class DynamismSpec:
    """how much dynamism and where moved vertices go

    level: moved vertices as a fraction of all vertices, in [0, 1]
    interleave_reads: replay slices of a workload between batches of moves,
        required by LEAST_TRAFFIC
    batches: number of move batches when reads are interleaved
    """

    policy: InsertPolicy = InsertPolicy.RANDOM
    level: float = 0.01
    seed: int = 0
    interleave_reads: bool = False
    batches: int = BATCHES

    def validate(self):
        try:
            self.policy = InsertPolicy(self.policy)
        except ValueError as exc:
            raise DynamismSpecError(str(exc)) from None
        if not 0 <= self.level <= 1:
            raise DynamismSpecError(f"level {self.level} outside [0, 1]")
        if self.batches < 1:
            raise DynamismSpecError("batches has to be >= 1")
        if self.policy is InsertPolicy.LEAST_TRAFFIC:
            self.interleave_reads = True
        return self

    def units(self, num_vertices):
        """number of moves for a graph of num_vertices vertices"""
        return math.floor(round(self.level * num_vertices, 9))


def gen_dynamism(emulator, spec, workload=None, progress=False):
    """generate a dynamism log, emulator itself is left untouched

    moves are simulated on a clone so the policies see the effect of earlier
    moves. with interleaved reads the moves are split into spec.batches
    batches and an equal slice of workload is replayed before every batch
    """
    spec.validate()
    if spec.interleave_reads and workload is None:
        raise DynamismSpecError(
            f"{spec.policy.value} dynamism needs a workload to interleave"
        )

    rng = np.random.default_rng(spec.seed)
    n = emulator.graph.num_vertices
    vertices = rng.choice(n, size=spec.units(n), replace=False)
    insert = InsertPartitioner(spec.policy, rng)
    clone = emulator.clone()

    if spec.interleave_reads:
        moves = np.array_split(vertices, spec.batches)
        reads = np.array_split(np.arange(len(workload)), spec.batches)
    else:
        moves, reads = [vertices], [np.arange(0)]

    header = {
        SEED: str(spec.seed),
        "policy": spec.policy.value,
        "level": repr(float(spec.level)),
    }
    log = DynamismLog(header=header)
    for batch, read in zip(moves, reads):
        replay(clone, [workload[i] for i in read], progress=progress)
        for vid in batch.tolist():
            target = insert.assign(vid, clone)
            clone.move_vertices([vid], target)
            log.records.append(DynamismRecord(len(log), vid, target))

    logging.info(
        f"generated {len(log)} {spec.policy.value} moves for level "
        f"{spec.level:g}"
    )
    return log


def apply_dynamism(emulator, log):
    """move every vertex of log, the graph structure is asserted unchanged"""
    before = emulator.graph.structure_hash()
    for record in log:
        emulator.move_vertices([record.vertex], record.target)
    if emulator.graph.structure_hash() != before:
        raise AssertionError("dynamism changed the graph structure")
    return emulator.partition_map


def split_log(log, parts):
    """log split into parts consecutive slices of near equal length"""
    slices = np.array_split(np.arange(len(log)), parts)
    return [
        DynamismLog([log[i] for i in indices], log.header)
        for indices in slices
    ]


def change_log(log):
    """diffusion change log with one move per dynamism record"""
    return ChangeLog.from_moves(log.vertices, log.targets)
