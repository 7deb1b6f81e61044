"""experiment definitions and the flat config file format

a config file holds one `section.key = value` setting per line, values are
typed with yaml so numbers, booleans, lists and bare strings all work:

    experiment.kind = INSERT
    experiment.k = 4
    dataset.kind = FS
    fs.target_vertices = 1000
    dynamism.levels = [0.05, 0.25]
"""
import dataclasses
import enum
import pathlib

import yaml

from ..datasets.filesystem import FsGenSpec, generate_fs
from ..datasets.gis import GisGenSpec, generate_gis
from ..datasets.social import SocialGenSpec, generate_social
from ..partitioner.base import PartitionerSpec, PartitionMethod
from ..partitioner.didic import DidicConfig
from ..partitioner.framework import InsertPolicy
from ..simulator.dynamism import LEVELS, DynamismSpec
from ..simulator.logs import OperationKind
from ..simulator.operations import WorkloadError, WorkloadSpec

SECTIONS = (
    "experiment",
    "dataset",
    "fs",
    "gis",
    "social",
    "didic",
    "workload",
    "dynamism",
)
OUT = "results"


class ConfigError(ValueError):
    """a setting is unknown or has an invalid value

    key: the offending `section.key`, or just the section
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ExperimentError(RuntimeError):
    """an experiment could not be completed"""


class ExperimentKind(str, enum.Enum):
    STATIC = "STATIC"
    INSERT = "INSERT"
    STRESS = "STRESS"
    DYNAMIC = "DYNAMIC"


class DatasetKind(str, enum.Enum):
    FS = "FS"
    GIS = "GIS"
    SOCIAL = "SOCIAL"


PATTERNS = {
    DatasetKind.FS: (OperationKind.FS_BFS,),
    DatasetKind.GIS: (
        OperationKind.GIS_ASTAR_SHORT,
        OperationKind.GIS_ASTAR_LONG,
    ),
    DatasetKind.SOCIAL: (OperationKind.SOCIAL_FOAF,),
}
METHODS = {
    DatasetKind.FS: (
        PartitionMethod.RANDOM,
        PartitionMethod.HARDCODED_FS,
        PartitionMethod.DIDIC,
    ),
    DatasetKind.GIS: (
        PartitionMethod.RANDOM,
        PartitionMethod.HARDCODED_GIS_LON,
        PartitionMethod.DIDIC,
    ),
    DatasetKind.SOCIAL: (PartitionMethod.RANDOM, PartitionMethod.DIDIC),
}
HARDCODED = {
    PartitionMethod.HARDCODED_FS: DatasetKind.FS,
    PartitionMethod.HARDCODED_GIS_LON: DatasetKind.GIS,
}


def parse_config(source):
    """read `section.key = value` lines into {section: {key: value}}

    blank lines and lines starting with # are skipped
    """
    config = {}
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, text = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(
                f"line {lineno}: expected section.key = value", key
            )
        section, dot, name = key.partition(".")
        if not dot or not name:
            raise ConfigError(f"line {lineno}: {key} has no section", key)
        if section not in SECTIONS:
            raise ConfigError(f"unknown section {section!r}", key)
        try:
            value = yaml.safe_load(text.strip())
        except yaml.YAMLError:
            raise ConfigError(
                f"cannot parse the value of {key}", key
            ) from None
        if value is None:
            raise ConfigError(f"{key} has no value", key)
        if name in config.get(section, {}):
            raise ConfigError(f"{key} is set twice", key)
        config.setdefault(section, {})[name] = value
    return config


def read_config(path):
    with open(path) as source:
        return parse_config(source)


def generate_dataset(kind, spec):
    """graph for a dataset kind from its generator spec"""
    match DatasetKind(kind):
        case DatasetKind.FS:
            return generate_fs(spec)
        case DatasetKind.GIS:
            return generate_gis(spec)
        case DatasetKind.SOCIAL:
            return generate_social(spec)


def _replace(obj, section, values, skip=()):
    names = {field.name for field in dataclasses.fields(obj)} - set(skip)
    for name in values:
        if name not in names:
            raise ConfigError(
                f"unknown key {section}.{name}", f"{section}.{name}"
            )
    return dataclasses.replace(obj, **values)


def _plain(value):
    """value with enums, tuples and paths turned into yaml friendly types"""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, pathlib.PurePath):
        return str(value)
    return value


@dataclasses.dataclass
class ExperimentSpec:
    """everything an experiment run depends on, seeds included

    seed: seed of the partitioners, the dataset has its own seed
    methods: partitioning methods, the defaults of the dataset if None
    policies, levels: dynamism grid of insert, stress and dynamic runs
    reinit_loads: repair from loads re-initialised on the degraded map
        instead of the loads of the diffusion baseline
    parallel: experiment cells computed side by side
    """

    kind: ExperimentKind = ExperimentKind.STATIC
    dataset: DatasetKind = DatasetKind.FS
    k: int = 2
    seed: int = 0
    methods: list = None
    policies: list = None
    levels: list = None
    reinit_loads: bool = False
    parallel: int = 1
    out: str = OUT
    fs: FsGenSpec = dataclasses.field(default_factory=FsGenSpec)
    gis: GisGenSpec = dataclasses.field(default_factory=GisGenSpec)
    social: SocialGenSpec = dataclasses.field(default_factory=SocialGenSpec)
    didic: DidicConfig = dataclasses.field(default_factory=DidicConfig)
    workload: WorkloadSpec = dataclasses.field(default_factory=WorkloadSpec)
    dynamism: DynamismSpec = dataclasses.field(default_factory=DynamismSpec)

    @classmethod
    def from_config(cls, config, **overrides):
        """spec from parsed config sections, overrides win over the file

        overrides: experiment level fields such as kind, seed or out, None
            values are ignored
        """
        spec = cls()
        experiment = dict(config.get("experiment", {}))
        dataset = config.get("dataset", {})
        for name in dataset:
            if name not in ("kind", "seed"):
                raise ConfigError(
                    f"unknown key dataset.{name}", f"dataset.{name}"
                )
        if "kind" in dataset:
            experiment["dataset"] = dataset["kind"]
        experiment.update(
            {key: val for key, val in overrides.items() if val is not None}
        )
        spec = _replace(
            spec,
            "experiment",
            experiment,
            skip=("fs", "gis", "social", "didic", "workload", "dynamism"),
        )

        for section in ("fs", "gis", "social"):
            values = dict(config.get(section, {}))
            if "seed" in dataset:
                values.setdefault("seed", dataset["seed"])
            current = getattr(spec, section)
            setattr(spec, section, _replace(current, section, values))
        spec.didic = _replace(
            spec.didic, "didic", config.get("didic", {}), skip=("k", "seed")
        )
        spec.workload = _replace(
            spec.workload,
            "workload",
            config.get("workload", {}),
            skip=("pattern",),
        )
        dynamism = dict(config.get("dynamism", {}))
        for name in ("policies", "levels"):
            if name in dynamism and overrides.get(name) is None:
                setattr(spec, name, dynamism.pop(name))
        spec.dynamism = _replace(
            spec.dynamism,
            "dynamism",
            dynamism,
            skip=("policy", "level", "interleave_reads"),
        )
        return spec.validate()

    def _check(self, section, validate):
        try:
            return validate()
        except (TypeError, ValueError, WorkloadError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{section}: {exc}", section) from exc

    def _check_experiment(self):
        self.kind = ExperimentKind(self.kind)
        self.dataset = DatasetKind(self.dataset)
        if self.k < 1:
            raise ConfigError("experiment.k has to be >= 1", "experiment.k")
        if self.parallel < 1:
            raise ConfigError(
                "experiment.parallel has to be >= 1", "experiment.parallel"
            )

        if self.methods is None:
            self.methods = list(METHODS[self.dataset])
        if isinstance(self.methods, str):
            self.methods = [self.methods]
        self.methods = [
            PartitionerSpec(method, self.k, self.seed).validate().method
            for method in self.methods
        ]
        for method in self.methods:
            dataset = HARDCODED.get(method, self.dataset)
            if dataset is not self.dataset:
                raise ConfigError(
                    f"{method.value} only partitions {dataset.value} graphs",
                    "experiment.methods",
                )
        if (
            self.kind is not ExperimentKind.STATIC
            and PartitionMethod.DIDIC not in self.methods
        ):
            raise ConfigError(
                f"{self.kind.value} experiments repair a DIDIC baseline",
                "experiment.methods",
            )

    def _check_dynamism(self):
        if self.policies is None:
            self.policies = list(InsertPolicy)
        if self.levels is None:
            self.levels = list(LEVELS)
        if isinstance(self.policies, str):
            self.policies = [self.policies]
        if not isinstance(self.levels, list):
            self.levels = [self.levels]
        self.policies = [
            self.dynamic_spec(policy, 0.0).validate().policy
            for policy in self.policies
        ]
        self.levels = [float(level) for level in self.levels]
        for level in self.levels:
            self.dynamic_spec(self.policies[0], level).validate()
        self.dynamism.validate()

    def validate(self):
        self._check("experiment", self._check_experiment)
        self._check(self.dataset.value.lower(), self.dataset_spec().validate)
        self._check("didic", self.didic_config().validate)
        workload = self.workload_spec(self.patterns()[0])
        self._check("workload", workload.validate)
        self._check("dynamism", self._check_dynamism)
        return self

    def dataset_spec(self):
        match self.dataset:
            case DatasetKind.FS:
                return self.fs
            case DatasetKind.GIS:
                return self.gis
            case DatasetKind.SOCIAL:
                return self.social
            case _:
                raise ConfigError(
                    f"unknown dataset {self.dataset!r}", "dataset.kind"
                )

    def generate(self):
        return generate_dataset(self.dataset, self.dataset_spec())

    def patterns(self):
        """workload patterns of the dataset, long gis searches only in
        static experiments
        """
        patterns = PATTERNS[DatasetKind(self.dataset)]
        if self.kind is ExperimentKind.STATIC:
            return patterns
        return tuple(
            pattern
            for pattern in patterns
            if pattern is not OperationKind.GIS_ASTAR_LONG
        )

    def didic_config(self):
        return dataclasses.replace(self.didic, k=self.k, seed=self.seed)

    def partitioner_spec(self, method):
        return PartitionerSpec(method, self.k, self.seed)

    def workload_spec(self, pattern):
        return dataclasses.replace(self.workload, pattern=pattern)

    def dynamic_spec(self, policy, level):
        return dataclasses.replace(self.dynamism, policy=policy, level=level)

    @property
    def out_dir(self):
        return pathlib.Path(self.out)

    def to_dict(self):
        """resolved spec as plain data for the provenance file"""
        return _plain(dataclasses.asdict(self))
