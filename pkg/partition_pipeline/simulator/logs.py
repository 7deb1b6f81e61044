"""line formats of operation logs and dynamism logs

both formats start with optional header lines "# key value", the seed the
log was generated with among them, followed by one record per line:

    operation log:  seq kind param1 param2 ...
    dynamism log:   seq vertex target

writing a parsed log reproduces the file byte for byte.
"""
import enum

from ..graph.formats import GraphFormatError

HEADER_PREFIX = "# "
SEED = "seed"


class OperationKind(str, enum.Enum):
    """read operation patterns and the number of vertex ids they take"""

    FS_BFS = "FS_BFS"
    GIS_ASTAR_SHORT = "GIS_ASTAR_SHORT"
    GIS_ASTAR_LONG = "GIS_ASTAR_LONG"
    SOCIAL_FOAF = "SOCIAL_FOAF"

    @property
    def num_params(self):
        return 1 if self is OperationKind.SOCIAL_FOAF else 2


class OperationRecord:
    """one logged read operation

    params: start vertex, then end vertex when the kind has one
    """

    __slots__ = "seq", "kind", "params"

    def __init__(self, seq, kind, params):
        self.seq = int(seq)
        self.kind = OperationKind(kind)
        self.params = tuple(int(param) for param in params)
        if len(self.params) != self.kind.num_params:
            raise ValueError(
                f"{self.kind.value} takes {self.kind.num_params} vertex ids, "
                f"got {len(self.params)}"
            )

    def __repr__(self):
        args = self.seq, self.kind.value, self.params
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    def __eq__(self, other):
        if not isinstance(other, OperationRecord):
            return NotImplemented
        return (self.seq, self.kind, self.params) == (
            other.seq,
            other.kind,
            other.params,
        )

    @property
    def start(self):
        return self.params[0]

    @property
    def end(self):
        return self.params[-1]

    def format(self):
        params = " ".join(str(param) for param in self.params)
        return f"{self.seq} {self.kind.value} {params}"


class DynamismRecord:
    """one dynamism unit, vertex moves to target"""

    __slots__ = "seq", "vertex", "target"

    def __init__(self, seq, vertex, target):
        self.seq = int(seq)
        self.vertex = int(vertex)
        self.target = int(target)

    def __repr__(self):
        args = self.seq, self.vertex, self.target
        argstr = ", ".join([repr(arg) for arg in args])
        return f"{self.__class__.__name__}({argstr})"

    def __eq__(self, other):
        if not isinstance(other, DynamismRecord):
            return NotImplemented
        return (self.seq, self.vertex, self.target) == (
            other.seq,
            other.vertex,
            other.target,
        )

    def format(self):
        return f"{self.seq} {self.vertex} {self.target}"


class _Log:
    """records with an ordered header of string values"""

    def __init__(self, records=(), header=None):
        self.records = list(records)
        self.header = {} if header is None else dict(header)

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(records={len(self)}, "
            f"header={self.header!r})"
        )

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.records, self.header) == (other.records, other.header)

    @property
    def seed(self):
        seed = self.header.get(SEED)
        return None if seed is None else int(seed)

    def write(self, sink):
        for key, value in self.header.items():
            sink.write(f"{HEADER_PREFIX}{key} {value}\n")
        for record in self.records:
            sink.write(record.format() + "\n")

    @classmethod
    def read(cls, source):
        header = {}
        records = []
        for lineno, line in enumerate(source, 1):
            line = line.rstrip("\n")
            if line.startswith(HEADER_PREFIX):
                if records:
                    raise GraphFormatError("header after records", lineno)
                key, _, value = line[len(HEADER_PREFIX) :].partition(" ")
                if not key or key in header:
                    raise GraphFormatError(
                        f"bad or repeated header {key!r}", lineno
                    )
                header[key] = value
                continue
            tokens = line.split()
            if not tokens:
                raise GraphFormatError("empty line", lineno)
            records.append(cls._parse(tokens, lineno))
        return cls(records, header)


class OperationLog(_Log):
    """replayable sequence of read operations"""

    @classmethod
    def _parse(cls, tokens, lineno):
        if len(tokens) < 2:
            raise GraphFormatError("record needs seq and kind", lineno)
        try:
            kind = OperationKind(tokens[1])
        except ValueError:
            raise GraphFormatError(
                f"unknown operation kind {tokens[1]!r}", lineno
            ) from None
        try:
            return OperationRecord(int(tokens[0]), kind, map(int, tokens[2:]))
        except ValueError as exc:
            raise GraphFormatError(str(exc), lineno) from exc


class DynamismLog(_Log):
    """ordered vertex moves"""

    @classmethod
    def _parse(cls, tokens, lineno):
        if len(tokens) != 3:
            raise GraphFormatError("record needs seq, vertex, target", lineno)
        try:
            return DynamismRecord(*(int(token) for token in tokens))
        except ValueError:
            raise GraphFormatError(
                f"non-integer token in {tokens}", lineno
            ) from None

    @property
    def vertices(self):
        return [record.vertex for record in self.records]

    @property
    def targets(self):
        return [record.target for record in self.records]


def write_operation_log(log, sink):
    log.write(sink)


def read_operation_log(source):
    return OperationLog.read(source)


def write_dynamism_log(log, sink):
    log.write(sink)


def read_dynamism_log(source):
    return DynamismLog.read(source)
