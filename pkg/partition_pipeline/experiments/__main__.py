"""experiment script
Generates a dataset, partitions it and replays its workloads
Writes metrics, balance and series csvs plus the resolved settings

relies on the properties set in the script, use the partition_pipeline cli
with --config for other settings
"""
import logging
import pathlib

from .runner import ExperimentRunner
from .specs import ExperimentSpec, read_config

# experiment properties
EXPERIMENT = "STATIC"  # "INSERT", "STRESS", "DYNAMIC"
DATASET = "FS"  # "GIS", "SOCIAL"
K = 2  # number of partitions, 1 is a control without global traffic
SEED = 0  # seed of the partitioners, datasets use DATASET_SEED
DATASET_SEED = 0
METHODS = None  # defaults of the dataset, e.g. ["RANDOM", "DIDIC"]

# script properties
PARALLEL = 1  # compute this many experiment cells side by side
REINIT_LOADS = False  # repair from re-initialised loads, not the baseline's
OUT = pathlib.Path("results")
CONFIG = None  # optional config file, its settings win over the above


def _main():
    config = {} if CONFIG is None else read_config(CONFIG)
    config.setdefault("dataset", {}).setdefault("seed", DATASET_SEED)
    experiment = config.setdefault("experiment", {})
    for key, value in [
        ("kind", EXPERIMENT),
        ("dataset", DATASET),
        ("k", K),
        ("seed", SEED),
        ("methods", METHODS),
        ("parallel", PARALLEL),
        ("reinit_loads", REINIT_LOADS),
        ("out", str(OUT)),
    ]:
        if value is not None:
            experiment.setdefault(key, value)
    spec = ExperimentSpec.from_config(config)
    reports = ExperimentRunner(spec).run()
    logging.info(f"experiment completed with {len(reports)} reports")


if __name__ == "__main__":
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s:%(levelname)s:%(name)s:%(message)s",
    )
    _main()
