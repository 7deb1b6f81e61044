import csv
import pathlib

import pytest
import yaml

from partition_pipeline.__main__ import main
from partition_pipeline.partitioner import didic

CONFIG = pathlib.Path(__file__).parent / "data" / "fs_1k.conf"


def run(*argv):
    return main(["--quiet", *map(str, argv)])


def read_rows(path):
    with open(path) as source:
        return list(csv.DictReader(source))


@pytest.fixture
def fs_graph(tmp_path):
    path = tmp_path / "fs.gml"
    assert run("generate", "fs", "--config", CONFIG, "--out", path) == 0
    return path


def test_missing_command():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["cluster"],
        ["generate", "FS", "--bogus"],
        ["generate", "ROADS"],
        ["partition", "METIS", "graph.gml"],
        ["experiment", "static", "--parallel", "two"],
    ],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1
    assert "usage:" in capsys.readouterr().err


def test_help():
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0


def test_generate_describe(tmp_path):
    path = tmp_path / "fs.gml"
    assert (
        run("generate", "FS", "--config", CONFIG, "--out", path, "--describe")
        == 0
    )
    with open(tmp_path / "fs.yaml") as source:
        statistics = yaml.safe_load(source)
    assert 850 <= statistics["vertices"] <= 1000
    assert path.read_text().startswith("graph [")


def test_generate_chaco_to_stdout(tmp_path, capsys):
    config = tmp_path / "social.conf"
    config.write_text("social.target_vertices = 50\n")
    code = run("generate", "SOCIAL", "--config", config, "--format", "chaco")
    assert code == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.split()[0] == "50"


def test_generate_seed(tmp_path):
    for name, seed in [("a", 1), ("b", 1), ("c", 2)]:
        path = tmp_path / f"{name}.gml"
        argv = ["generate", "FS", "--config", CONFIG, "--seed", seed]
        assert run(*argv, "--out", path) == 0
    first = (tmp_path / "a.gml").read_text()
    assert first == (tmp_path / "b.gml").read_text()
    assert first != (tmp_path / "c.gml").read_text()


def test_partition_is_deterministic(tmp_path, fs_graph):
    maps = []
    for name in ("a", "b"):
        path = tmp_path / f"{name}.map"
        argv = ["partition", "random", fs_graph, "--k", 2, "--seed", 7]
        assert run(*argv, "--out", path) == 0
        maps.append(path.read_text())
    assert maps[0] == maps[1]
    assert maps[0].splitlines()[0].startswith("2 ")


def test_metrics_single_partition(tmp_path, fs_graph):
    partition = tmp_path / "one.map"
    argv = ["partition", "RANDOM", fs_graph, "--k", 1, "--out", partition]
    assert run(*argv) == 0
    metrics = tmp_path / "metrics.csv"
    assert run("metrics", fs_graph, partition, "--out", metrics) == 0
    (row,) = read_rows(metrics)
    assert float(row["edge_cut_weight"]) == 0.0
    assert float(row["edge_cut_fraction"]) == 0.0


def test_workload_gen_and_replay(tmp_path, fs_graph):
    partition = tmp_path / "fs.map"
    log = tmp_path / "fs.log"
    report = tmp_path / "replay.csv"
    assert run("partition", "HARDCODED_FS", fs_graph, "--out", partition) == 0
    argv = ["workload", "gen", fs_graph, "FS_BFS", "--num-ops", 30]
    assert run(*argv, "--seed", 1, "--out", log) == 0
    assert log.read_text().startswith("# seed 1\n")
    argv = ["workload", "replay", fs_graph, partition, log, "--out", report]
    assert run(*argv) == 0
    (row,) = read_rows(report)
    assert row["pattern"] == "FS_BFS"
    assert 0.0 <= float(row["pct_global"]) < 1.0
    assert int(row["local_traffic"]) > 0


def test_invalid_config_key(tmp_path, capsys):
    config = tmp_path / "bad.conf"
    config.write_text("fs.depthh = 3\n")
    code = run("generate", "FS", "--config", config)
    assert code == 2
    assert "fs.depthh" in capsys.readouterr().err


def test_invalid_partition_count(fs_graph):
    assert run("partition", "RANDOM", fs_graph, "--k", 0) == 2


def test_non_finite_diffusion_fails(monkeypatch, fs_graph):
    def diverge(*args):
        raise FloatingPointError("diffusion produced non finite load")

    monkeypatch.setattr(didic, "didic_iteration", diverge)
    assert run("partition", "DIDIC", fs_graph, "--config", CONFIG) == 3


def test_hardcoded_method_on_wrong_graph(tmp_path):
    config = tmp_path / "social.conf"
    config.write_text("social.target_vertices = 50\n")
    graph = tmp_path / "social.gml"
    assert run("generate", "SOCIAL", "--config", config, "--out", graph) == 0
    assert run("partition", "HARDCODED_FS", graph) == 2


def test_missing_graph_file(tmp_path, capsys):
    code = run("metrics", tmp_path / "nope.gml", tmp_path / "nope.map")
    assert code == 3
    assert "failed" in capsys.readouterr().err


def test_map_of_another_graph(tmp_path, fs_graph):
    partition = tmp_path / "small.map"
    partition.write_text("2 3\n0\n1\n0\n")
    assert run("metrics", fs_graph, partition) == 3


def test_experiment_static(tmp_path):
    argv = ["experiment", "static", "--config", CONFIG, "--out", tmp_path]
    assert run(*argv) == 0
    out = tmp_path / "static"
    for name in ("metrics.csv", "balance.csv", "series.csv"):
        assert (out / name).exists()
    rows = read_rows(out / "metrics.csv")
    assert [row["method"] for row in rows] == [
        "RANDOM",
        "HARDCODED_FS",
        "DIDIC",
    ]
    with open(out / "provenance.yaml") as source:
        provenance = yaml.safe_load(source)
    assert provenance["seed"] == 3
    assert provenance["fs"]["seed"] == 1
