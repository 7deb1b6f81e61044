"""metrics reports of experiment cells and the files they are written to"""
import csv
import dataclasses
import logging

import yaml

from ..graph.metrics import (
    BalanceReport,
    QualityReport,
    balance_report,
    quality_report,
)
from ..simulator.operations import TrafficSummary, total_traffic
from .specs import ExperimentError

METRICS = "metrics.csv"
BALANCE = "balance.csv"
SERIES = "series.csv"
PROVENANCE = "provenance.yaml"
METRIC_COLUMNS = [
    "experiment",
    "method",
    "pattern",
    "policy",
    "level",
    "step",
    "edge_cut",
    "edge_cut_weight",
    "conductance",
    "modularity",
    "cov_traffic",
    "cov_vertices",
    "cov_edges",
    "local_traffic",
    "global_traffic",
    "pct_global",
]
BALANCE_COLUMNS = [
    "experiment",
    "partition",
    "vertices",
    "edges",
    "local_traffic",
    "global_traffic",
]
SERIES_COLUMNS = [
    "experiment",
    "rank",
    "operation",
    "total",
    "global",
    "pct_global",
    "sorted_pct_global",
]


@dataclasses.dataclass
class MetricsReport:
    """result of replaying one workload on one partitioning

    experiment: id of the cell, unique within an experiment
    infos: InstanceInfo of every partition after the replay
    traffic: traffic of the whole replay
    series: TrafficSummary of every operation in log order
    policy, level: dynamism applied before the replay, empty without
    step: position in a sequence of repairs, 0 before any repair
    """

    experiment: str
    method: str
    pattern: str
    infos: list
    quality: QualityReport
    balance: BalanceReport
    traffic: TrafficSummary
    series: list
    policy: str = ""
    level: float = 0.0
    step: int = 0

    @property
    def pct_global(self):
        return self.traffic.pct_global

    @classmethod
    def collect(cls, experiment, emulator, summaries, **cell):
        """report of emulator after summaries were replayed on it

        the emulator counters have to hold exactly the traffic of summaries
        """
        infos = emulator.snapshot_all()
        traffic = total_traffic(summaries)
        counted = TrafficSummary(
            sum(info.local_traffic for info in infos),
            sum(info.global_traffic for info in infos),
        )
        if counted != traffic:
            raise ExperimentError(
                f"{experiment}: emulator counted {counted}, operations "
                f"{traffic}"
            )
        return cls(
            experiment,
            infos=infos,
            quality=quality_report(emulator.graph, emulator.partition_map),
            balance=balance_report(infos),
            traffic=traffic,
            series=list(summaries),
            **cell,
        )

    def as_row(self):
        return {
            "experiment": self.experiment,
            "method": self.method,
            "pattern": self.pattern,
            "policy": self.policy,
            "level": self.level,
            "step": self.step,
            "edge_cut": self.quality.edge_cut_fraction,
            "edge_cut_weight": self.quality.edge_cut_weight,
            "conductance": self.quality.conductance,
            "modularity": self.quality.modularity,
            "cov_traffic": self.balance.cov_traffic,
            "cov_vertices": self.balance.cov_vertices,
            "cov_edges": self.balance.cov_edges,
            "local_traffic": self.traffic.local_traffic,
            "global_traffic": self.traffic.global_traffic,
            "pct_global": self.pct_global,
        }

    def sorted_series(self):
        """(operation, summary) pairs by total traffic, largest first"""
        return sorted(
            enumerate(self.series), key=lambda item: -item[1].total_traffic
        )

    def global_fractions(self):
        """global fraction of every operation, largest first"""
        return sorted(
            (summary.pct_global for summary in self.series), reverse=True
        )


def _writer(sink, columns):
    writer = csv.DictWriter(sink, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    return writer


def write_metrics_csv(reports, sink):
    """one row per report, only the header for no reports"""
    writer = _writer(sink, METRIC_COLUMNS)
    for report in reports:
        writer.writerow(report.as_row())


def write_balance_csv(reports, sink):
    """sizes and traffic of every partition of every report"""
    writer = _writer(sink, BALANCE_COLUMNS)
    for report in reports:
        for info in report.infos:
            writer.writerow(
                {
                    "experiment": report.experiment,
                    "partition": info.pid,
                    "vertices": info.num_vertices,
                    "edges": info.num_edges,
                    "local_traffic": info.local_traffic,
                    "global_traffic": info.global_traffic,
                }
            )


def write_series_csv(reports, sink):
    """per operation traffic sorted by total traffic

    sorted_pct_global holds the global fractions sorted on their own, the
    rank-th largest fraction is not necessarily the one of the operation in
    the same row
    """
    writer = _writer(sink, SERIES_COLUMNS)
    for report in reports:
        fractions = report.global_fractions()
        for rank, (operation, summary) in enumerate(report.sorted_series()):
            writer.writerow(
                {
                    "experiment": report.experiment,
                    "rank": rank,
                    "operation": operation,
                    "total": summary.total_traffic,
                    "global": summary.global_traffic,
                    "pct_global": summary.pct_global,
                    "sorted_pct_global": fractions[rank],
                }
            )


def write_provenance(spec, sink):
    yaml.safe_dump(spec.to_dict(), sink, sort_keys=True)


def write_results(out_dir, spec, reports, series=False):
    """write metrics, balance and optionally series csvs plus provenance

    returns the paths written
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = [
        (METRICS, write_metrics_csv, reports),
        (BALANCE, write_balance_csv, reports),
        (PROVENANCE, write_provenance, spec),
    ]
    if series:
        outputs.append((SERIES, write_series_csv, reports))

    paths = []
    for name, write, content in outputs:
        path = out_dir / name
        if path.exists():
            logging.info(f"overwriting {path}")
        with open(path, "w", newline="") as sink:
            write(content, sink)
        paths.append(path)
    return paths
