"""command line interface

generates datasets, partitions graphs, computes metrics, generates and
replays workloads and runs experiments. exit codes: 0 success, 1 usage,
2 invalid settings, 3 failure while running.
"""
import argparse
import contextlib
import csv
import dataclasses
import logging
import pathlib
import sys

import yaml

from .datasets.statistics import describe
from .datasets.topology import DatasetSpecError
from .experiments.runner import ExperimentRunner
from .experiments.reports import MetricsReport, write_metrics_csv
from .experiments.specs import (
    ConfigError,
    DatasetKind,
    ExperimentError,
    ExperimentKind,
    ExperimentSpec,
    generate_dataset,
    read_config,
)
from .graph.core import GraphError, PartitionMapError
from .graph.formats import (
    GraphFormatError,
    read_chaco,
    read_gml,
    read_partition_map,
    write_chaco,
    write_gml,
    write_partition_map,
)
from .graph.metrics import MetricError, quality_report
from .partitioner.base import PartitionerError, PartitionMethod
from .partitioner.didic import DidicConfigError
from .partitioner.framework import make_partitioner
from .simulator.dynamism import DynamismSpecError
from .simulator.emulator import Emulator
from .simulator.logs import (
    OperationKind,
    read_operation_log,
    write_operation_log,
)
from .simulator.operations import WorkloadError, generate_workload, replay

EXIT_USAGE = 1
EXIT_SETTINGS = 2
EXIT_FAILURE = 3
SETTINGS_ERRORS = (
    ConfigError,
    DidicConfigError,
    DatasetSpecError,
    PartitionerError,
    DynamismSpecError,
)
RUNTIME_ERRORS = (
    GraphError,
    PartitionMapError,
    GraphFormatError,
    MetricError,
    WorkloadError,
    ExperimentError,
    FloatingPointError,
    OSError,
)
GML_SUFFIX = ".gml"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


@contextlib.contextmanager
def _output(path):
    """open path for writing, stdout if path is None"""
    if path is None:
        yield sys.stdout
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as sink:
        yield sink


def _read_graph(path):
    """graph from a gml file or, for any other suffix, a chaco file"""
    with open(path) as source:
        if path.suffix == GML_SUFFIX:
            return read_gml(source)
        return read_chaco(source)


def _read_map(path):
    with open(path) as source:
        return read_partition_map(source)


def _spec(args, **overrides):
    config = {} if args.config is None else read_config(args.config)
    return ExperimentSpec.from_config(config, **overrides)


def _generate(args):
    spec = _spec(args, dataset=args.dataset)
    dataset_spec = spec.dataset_spec()
    if args.seed is not None:
        dataset_spec = dataclasses.replace(dataset_spec, seed=args.seed)
    graph = generate_dataset(spec.dataset, dataset_spec)

    with _output(args.out) as sink:
        if args.format == "chaco":
            write_chaco(graph, sink)
        else:
            write_gml(graph, sink)
    if args.describe:
        path = None if args.out is None else args.out.with_suffix(".yaml")
        with _output(path) as sink:
            yaml.safe_dump(describe(graph), sink, sort_keys=False)


def _partition(args):
    spec = _spec(args, k=args.k, seed=args.seed)
    graph = _read_graph(args.graph)
    partitioner = make_partitioner(
        spec.partitioner_spec(args.method),
        spec.didic_config(),
        progress=not args.quiet,
    )
    partition_map = partitioner.partition(graph)
    with _output(args.out) as sink:
        write_partition_map(partition_map, sink)


def _metrics(args):
    graph = _read_graph(args.graph)
    partition_map = _read_map(args.map)
    row = quality_report(graph, partition_map).as_row()
    with _output(args.out) as sink:
        writer = csv.DictWriter(
            sink, fieldnames=list(row), lineterminator="\n"
        )
        writer.writeheader()
        writer.writerow(row)


def _workload_gen(args):
    spec = _spec(args)
    workload = spec.workload_spec(args.pattern)
    if args.seed is not None:
        workload = dataclasses.replace(workload, seed=args.seed)
    if args.num_ops is not None:
        workload = dataclasses.replace(workload, num_ops=args.num_ops)
    log = generate_workload(_read_graph(args.graph), workload)
    with _output(args.out) as sink:
        write_operation_log(log, sink)


def _workload_replay(args):
    graph = _read_graph(args.graph)
    emulator = Emulator(graph, _read_map(args.map))
    with open(args.log) as source:
        log = read_operation_log(source)
    summaries = replay(emulator, log, progress=not args.quiet)
    pattern = log.header.get("pattern", "")
    report = MetricsReport.collect(
        args.log.stem, emulator, summaries, method="", pattern=pattern
    )
    logging.info(f"replayed {len(log)} operations")
    with _output(args.out) as sink:
        write_metrics_csv([report], sink)


def _experiment(args):
    spec = _spec(
        args,
        kind=args.kind.upper(),
        seed=args.seed,
        out=None if args.out is None else str(args.out),
        reinit_loads=args.reinit_loads or None,
        parallel=args.parallel,
    )
    reports = ExperimentRunner(spec, progress=not args.quiet).run()
    logging.info(f"experiment completed with {len(reports)} reports")


def _parser():
    parser = _Parser(
        prog="partition_pipeline",
        description="partitions graphs and simulates partitioned graph "
        "databases",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument(
        "-q", "--quiet", action="store_true", help="no progress bars"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=pathlib.Path)
    common.add_argument(
        "--config", type=pathlib.Path, help="section.key = value file"
    )

    generate = commands.add_parser(
        "generate", parents=[common], help="generate a dataset"
    )
    generate.add_argument(
        "dataset", type=str.upper, choices=[kind.value for kind in DatasetKind]
    )
    generate.add_argument("--format", choices=["gml", "chaco"], default="gml")
    generate.add_argument(
        "--describe",
        action="store_true",
        help="write graph statistics next to --out, to stdout without",
    )
    generate.set_defaults(func=_generate)

    partition = commands.add_parser(
        "partition", parents=[common], help="partition a graph"
    )
    partition.add_argument(
        "method", type=str.upper, choices=[m.value for m in PartitionMethod]
    )
    partition.add_argument("graph", type=pathlib.Path)
    partition.add_argument("--k", type=int, default=2)
    partition.set_defaults(func=_partition, seed=0)

    metrics = commands.add_parser(
        "metrics", parents=[common], help="partition quality as csv"
    )
    metrics.add_argument("graph", type=pathlib.Path)
    metrics.add_argument("map", type=pathlib.Path)
    metrics.set_defaults(func=_metrics)

    workload = commands.add_parser("workload", help="operation logs")
    actions = workload.add_subparsers(dest="action", required=True)
    gen = actions.add_parser(
        "gen", parents=[common], help="generate an operation log"
    )
    gen.add_argument("graph", type=pathlib.Path)
    gen.add_argument(
        "pattern", type=str.upper, choices=[k.value for k in OperationKind]
    )
    gen.add_argument("--num-ops", type=int)
    gen.set_defaults(func=_workload_gen)
    replaying = actions.add_parser(
        "replay", parents=[common], help="replay an operation log"
    )
    replaying.add_argument("graph", type=pathlib.Path)
    replaying.add_argument("map", type=pathlib.Path)
    replaying.add_argument("log", type=pathlib.Path)
    replaying.set_defaults(func=_workload_replay)

    experiment = commands.add_parser(
        "experiment", parents=[common], help="run an experiment"
    )
    experiment.add_argument(
        "kind", choices=[kind.value.lower() for kind in ExperimentKind]
    )
    experiment.add_argument("--reinit-loads", action="store_true")
    experiment.add_argument("--parallel", type=int)
    experiment.set_defaults(func=_experiment)
    return parser


def main(argv=None):
    """run the cli with argv, returns the exit code"""
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s:%(levelname)s:%(name)s:%(message)s",
    )
    try:
        args.func(args)
    except SETTINGS_ERRORS as exc:
        key = getattr(exc, "key", None)
        where = f" ({key})" if key else ""
        print(f"invalid settings{where}: {exc}", file=sys.stderr)
        return EXIT_SETTINGS
    except RUNTIME_ERRORS as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


def _main():
    sys.exit(main())


if __name__ == "__main__":
    _main()
