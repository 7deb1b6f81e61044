"""common interface of all partitioning methods"""
import abc
import dataclasses
import enum


class PartitionerError(ValueError):
    """a partitioning method cannot handle the given graph or settings"""


class PartitionMethod(str, enum.Enum):
    RANDOM = "RANDOM"
    HARDCODED_FS = "HARDCODED_FS"
    HARDCODED_GIS_LON = "HARDCODED_GIS_LON"
    DIDIC = "DIDIC"


@dataclasses.dataclass
class PartitionerSpec:
    """which method to partition with

    seed: seeds random assignment, also the initial map of DIDIC
    """

    method: PartitionMethod = PartitionMethod.RANDOM
    k: int = 2
    seed: int = 0

    def validate(self):
        try:
            self.method = PartitionMethod(self.method)
        except ValueError:
            raise PartitionerError(
                f"unknown partition method {self.method!r}"
            ) from None
        if self.k < 1:
            raise PartitionerError(f"partition count {self.k} has to be >= 1")
        return self


class Partitioner(abc.ABC):
    """assigns every vertex of a graph to one of k partitions

    k: partition count
    seed: seed for methods that use randomness
    """

    method = None

    def __init__(self, k, seed=0):
        if k < 1:
            raise PartitionerError(f"partition count {k} has to be >= 1")
        self.k = k
        self.seed = seed

    def __repr__(self):
        args = self.k, self.seed
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    @abc.abstractmethod
    def partition(self, graph):
        """partition graph

        returns a PartitionMap with self.k partitions
        """
