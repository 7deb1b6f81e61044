"""the four experiments on generated datasets

STATIC compares partitioning methods. INSERT applies dynamism to the
diffusion baseline and measures the damage, STRESS repairs every damaged
partitioning with one diffusion iteration and DYNAMIC alternates slices of
dynamism with single repair iterations.
"""
import concurrent.futures
import dataclasses
import logging

from tqdm import tqdm

from ..datasets.statistics import describe
from ..graph.core import PartitionMap
from ..partitioner.base import PartitionMethod
from ..partitioner.didic import LoadState
from ..partitioner.framework import (
    MigrationScheduler,
    RuntimeLogger,
    RuntimePartitioner,
    make_partitioner,
)
from ..simulator.dynamism import (
    apply_dynamism,
    change_log,
    gen_dynamism,
    split_log,
)
from ..simulator.emulator import Emulator
from ..simulator.logs import (
    SEED,
    read_dynamism_log,
    write_dynamism_log,
    write_operation_log,
)
from ..simulator.operations import generate_workload, replay
from .reports import MetricsReport, write_results
from .specs import ExperimentError, ExperimentKind

DYNAMIC_LEVEL = 0.25
DYNAMIC_SLICES = 5
REPAIR_ITERATIONS = 1


def _level_name(level):
    return f"{level:g}"


@dataclasses.dataclass
class Baseline:
    """converged diffusion partitioning and the loads it converged to"""

    partition_map: PartitionMap
    state: LoadState


class ExperimentRunner:
    """runs experiments of one spec, sharing the dataset, the workloads,
    the diffusion baseline and the dynamism logs between them

    progress: show tqdm bars for partitioning and replays
    """

    def __init__(self, spec, progress=True):
        self.spec = spec.validate()
        self.progress = progress
        self._graph = None
        self._workloads = {}
        self._baseline = None
        self._dynamism = {}

    def __repr__(self):
        return f"{self.__class__.__name__}({self.spec.kind.value!r})"

    @property
    def graph(self):
        if self._graph is None:
            self._graph = self.spec.generate()
            logging.info(f"generated {self.spec.dataset.value} dataset")
            logging.debug(f"dataset statistics: {describe(self._graph)}")
        return self._graph

    @property
    def out_dir(self):
        return self.spec.out_dir / self.spec.kind.value.lower()

    def workload(self, pattern):
        """evaluation log of pattern, written next to the results"""
        if pattern not in self._workloads:
            spec = self.spec.workload_spec(pattern)
            log = generate_workload(self.graph, spec)
            path = self.spec.out_dir / "workloads" / f"{pattern.value}.log"
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w") as sink:
                write_operation_log(log, sink)
            self._workloads[pattern] = log
        return self._workloads[pattern]

    def partition(self, method):
        method = PartitionMethod(method)
        if method is PartitionMethod.DIDIC:
            return self.baseline().partition_map.copy()
        partitioner = make_partitioner(self.spec.partitioner_spec(method))
        partition_map = partitioner.partition(self.graph)
        logging.info(f"partitioned with {method.value}")
        return partition_map

    def baseline(self):
        """diffusion partitioning every dynamism experiment starts from"""
        if self._baseline is None:
            partitioner = make_partitioner(
                self.spec.partitioner_spec(PartitionMethod.DIDIC),
                self.spec.didic_config(),
                self.progress,
            )
            partition_map = partitioner.partition(self.graph)
            self._baseline = Baseline(
                partition_map, partitioner.session.state.copy()
            )
            logging.info(f"partitioned with {PartitionMethod.DIDIC.value}")
        return self._baseline

    def dynamism_log(self, policy, level):
        """dynamism log of policy at level

        logs are persisted on first use and read back from disk by later
        experiments writing to the same output directory
        """
        key = policy, level
        if key in self._dynamism:
            return self._dynamism[key]

        path = (
            self.spec.out_dir
            / "dynamism"
            / f"{policy.value}_{_level_name(level)}.log"
        )
        spec = self.spec.dynamic_spec(policy, level).validate()
        log = self._stored_dynamism(path, spec)
        if log is None:
            emulator = Emulator(self.graph, self.baseline().partition_map)
            workload = self.workload(self.spec.patterns()[0])
            log = gen_dynamism(emulator, spec, workload)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w") as sink:
                write_dynamism_log(log, sink)
        self._dynamism[key] = log
        return log

    def _stored_dynamism(self, path, spec):
        """log at path if it was generated with spec on this graph"""
        if not path.exists():
            return None
        with open(path) as source:
            log = read_dynamism_log(source)

        n = self.graph.num_vertices
        header = {
            SEED: str(spec.seed),
            "policy": spec.policy.value,
            "level": repr(float(spec.level)),
        }
        if (
            log.header != header
            or len(log) != spec.units(n)
            or any(vid >= n for vid in log.vertices)
            or any(pid >= self.spec.k for pid in log.targets)
        ):
            logging.warning(f"ignoring dynamism log {path} of other settings")
            return None
        logging.info(f"reusing dynamism log {path}")
        return log

    def evaluate(self, experiment, emulator, pattern, **cell):
        """replay the evaluation log of pattern on fresh counters"""
        emulator.reset_traffic()
        summaries = replay(
            emulator,
            self.workload(pattern),
            self.spec.workload.foaf_depth,
            progress=self.progress and self.spec.parallel == 1,
        )
        report = MetricsReport.collect(
            experiment, emulator, summaries, pattern=pattern.value, **cell
        )
        logging.info(
            f"{experiment} finished, pct_global {report.pct_global:.4f}"
        )
        return report

    def repairer(self):
        baseline = self.baseline()
        return RuntimePartitioner.from_baseline(
            self.graph,
            baseline.partition_map,
            self.spec.didic_config(),
            baseline.state.copy(),
            iterations=REPAIR_ITERATIONS,
            reinit_loads=self.spec.reinit_loads,
        )

    def _cells(self, function, cells, desc):
        """run function(*cell) for every cell, results in cell order"""
        if self.spec.parallel == 1:
            return [function(*cell) for cell in cells]

        results = {}
        with concurrent.futures.ThreadPoolExecutor(
            max_workers=self.spec.parallel
        ) as executor:
            futures = {
                executor.submit(function, *cell): index
                for index, cell in enumerate(cells)
            }
            for future in tqdm(
                concurrent.futures.as_completed(futures),
                total=len(futures),
                desc=desc,
                unit="cells",
                disable=not self.progress,
            ):
                results[futures[future]] = future.result()
        return [results[index] for index in range(len(cells))]

    def _prepare(self):
        """build everything cells share before they run side by side"""
        for pattern in self.spec.patterns():
            self.workload(pattern)
        if (
            self.spec.kind is not ExperimentKind.STATIC
            or PartitionMethod.DIDIC in self.spec.methods
        ):
            self.baseline()

    def _grid(self):
        return [
            (policy, level)
            for policy in self.spec.policies
            for level in self.spec.levels
        ]

    def run_static(self):
        """every method on its own partitioning, one report per workload"""
        self._prepare()

        def cell(method):
            emulator = Emulator(self.graph, self.partition(method))
            return [
                self.evaluate(
                    f"{method.value}/{pattern.value}",
                    emulator,
                    pattern,
                    method=method.value,
                )
                for pattern in self.spec.patterns()
            ]

        methods = [(method,) for method in self.spec.methods]
        cells = self._cells(cell, methods, "partitioning")
        return [report for reports in cells for report in reports]

    def _degraded(self, policy, level):
        emulator = Emulator(self.graph, self.baseline().partition_map)
        log = self.dynamism_log(policy, level)
        apply_dynamism(emulator, log)
        return emulator, log

    def _dynamic_cell(self, policy, level, step=0):
        return {
            "method": PartitionMethod.DIDIC.value,
            "policy": policy.value,
            "level": level,
            "step": step,
        }

    def run_insert(self):
        """damage the baseline with every policy at every level"""
        self._prepare()
        grid = self._grid()
        for policy, level in grid:
            self.dynamism_log(policy, level)

        def cell(policy, level):
            emulator, _ = self._degraded(policy, level)
            return [
                self.evaluate(
                    f"{policy.value}/{_level_name(level)}/{pattern.value}",
                    emulator,
                    pattern,
                    **self._dynamic_cell(policy, level),
                )
                for pattern in self.spec.patterns()
            ]

        cells = self._cells(cell, grid, "inserting")
        return [report for reports in cells for report in reports]

    def _repair(self, repairer, emulator, log, logger):
        repaired = repairer.repartition(
            self.graph,
            emulator.partition_map,
            change_log(log),
            logger.snapshot(emulator),
        )
        scheduler = MigrationScheduler()
        scheduler.apply(
            emulator, scheduler.schedule(emulator.partition_map, repaired)
        )
        return emulator

    def run_stress(self):
        """one repair iteration on every damaged partitioning

        step 0 reports the damaged partitioning, step 1 the repaired one
        """
        self._prepare()
        grid = self._grid()
        for policy, level in grid:
            self.dynamism_log(policy, level)

        def cell(policy, level):
            emulator, log = self._degraded(policy, level)
            logger = RuntimeLogger()
            reports = []
            for step in range(2):
                if step:
                    self._repair(self.repairer(), emulator, log, logger)
                for pattern in self.spec.patterns():
                    reports.append(
                        self.evaluate(
                            f"{policy.value}/{_level_name(level)}/"
                            f"{pattern.value}/{step}",
                            emulator,
                            pattern,
                            **self._dynamic_cell(policy, level, step),
                        )
                    )
            return reports

        cells = self._cells(cell, grid, "stressing")
        return [report for reports in cells for report in reports]

    def run_dynamic(self):
        """alternate a slice of dynamism with one repair iteration

        the DYNAMIC_LEVEL log of every policy is split into DYNAMIC_SLICES
        slices, step 0 reports the undamaged baseline
        """
        self._prepare()
        for policy in self.spec.policies:
            self.dynamism_log(policy, DYNAMIC_LEVEL)

        def cell(policy):
            emulator = Emulator(self.graph, self.baseline().partition_map)
            slices = split_log(
                self.dynamism_log(policy, DYNAMIC_LEVEL), DYNAMIC_SLICES
            )
            repairer = self.repairer()
            logger = RuntimeLogger()
            reports = []
            for step in range(DYNAMIC_SLICES + 1):
                if step:
                    part = slices[step - 1]
                    apply_dynamism(emulator, part)
                    self._repair(repairer, emulator, part, logger)
                level = DYNAMIC_LEVEL * step / DYNAMIC_SLICES
                for pattern in self.spec.patterns():
                    reports.append(
                        self.evaluate(
                            f"{policy.value}/{pattern.value}/{step}",
                            emulator,
                            pattern,
                            **self._dynamic_cell(policy, level, step),
                        )
                    )
            return reports

        policies = [(policy,) for policy in self.spec.policies]
        cells = self._cells(cell, policies, "maintaining")
        return [report for reports in cells for report in reports]

    def run(self):
        """run the experiment of the spec and write its results

        returns the reports
        """
        match self.spec.kind:
            case ExperimentKind.STATIC:
                reports = self.run_static()
            case ExperimentKind.INSERT:
                reports = self.run_insert()
            case ExperimentKind.STRESS:
                reports = self.run_stress()
            case ExperimentKind.DYNAMIC:
                reports = self.run_dynamic()
            case _:
                raise ExperimentError(
                    f"unknown experiment kind {self.spec.kind!r}"
                )
        write_results(
            self.out_dir,
            self.spec,
            reports,
            series=self.spec.kind is ExperimentKind.STATIC,
        )
        return reports


def run_static(spec, progress=True):
    return ExperimentRunner(
        dataclasses.replace(spec, kind=ExperimentKind.STATIC), progress
    ).run()


def run_insert(spec, progress=True):
    return ExperimentRunner(
        dataclasses.replace(spec, kind=ExperimentKind.INSERT), progress
    ).run()


def run_stress(spec, progress=True):
    return ExperimentRunner(
        dataclasses.replace(spec, kind=ExperimentKind.STRESS), progress
    ).run()


def run_dynamic(spec, progress=True):
    return ExperimentRunner(
        dataclasses.replace(spec, kind=ExperimentKind.DYNAMIC), progress
    ).run()
